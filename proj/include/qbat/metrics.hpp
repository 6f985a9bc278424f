#pragma once

// Figures of merit of a charging trajectory.
//
// Energy zero: every energy is measured from <psi(0)|H_B|psi(0)> = -N w_z / 2.
// The single-TLS ergotropy uses the same shifted zero for the per-TLS energy
// (w_z/2)(r_z + 1), which makes the local and collective routes comparable.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qbat/dynamics.hpp"
#include "qbat/spin.hpp"

namespace qbat {

struct BlochVector {
  double rx = 0.0, ry = 0.0, rz = 0.0;

  double length() const;
};

struct ChargingSummary {
  int n_tls = 0;
  double g = 0.0;
  double e_max = 0.0;
  double t_e = 0.0;
  double p_max = 0.0;
  double t_p = 0.0;
};

struct MetricSeries {
  std::vector<double> times;
  std::vector<double> e_b;
  std::vector<double> power;
  std::vector<double> ergotropy_total;  // empty unless states were retained
  std::vector<double> ergotropy_single;
  std::vector<double> magnetization;
};

struct Peak {
  double time = 0.0;
  double value = 0.0;
};

/// first: earliest interior local maximum, parabola-refined. global: the
/// largest sample, kept as a diagnostic when no interior maximum exists.
struct PeakSearch {
  std::optional<Peak> first;
  Peak global;

  bool found() const { return first.has_value(); }
};

class NoMaximumError : public std::runtime_error {
 public:
  NoMaximumError(const std::string& what, Peak fallback) : std::runtime_error(what), fallback_(fallback) {}
  const Peak& fallback() const { return fallback_; }

 private:
  Peak fallback_;
};

std::vector<double> stored_energy(std::span<const double> sz, double omega_z, int n_tls);
/// P(t) = E_B(t)/t, with P(0) = 0.
std::vector<double> averaged_power(std::span<const double> e_b, std::span<const double> times);
std::vector<double> magnetization(std::span<const double> e_b, double omega_z, int n_tls);

/// r = 2 <S> / N; valid for permutation-symmetric states.
BlochVector single_tls_rdm(const SpinState& state);
BlochVector single_tls_rdm(double sx, double sy, double sz, int n_tls);

/// (w_z/2)(r_z + |r|)
double ergotropy_single(const BlochVector& bloch, double omega_z);

/// sum_{k,n} r_k e_n (|<r_k|e_n>|^2 - delta_kn). occupations descending and
/// summing to 1, levels ascending, overlaps(k, n) doubly stochastic within 1e-10.
double ergotropy_general(std::span<const double> occupations, std::span<const double> levels,
                         const Eigen::MatrixXd& overlaps);

/// Collective ergotropy of a pure state w.r.t. H_B = w_z S_z, through the
/// density-matrix eigendecomposition and ergotropy_general.
double total_ergotropy(const SpinState& state, double omega_z);

/// Needs at least 3 samples. Ties go to the earliest interior maximum.
PeakSearch find_first_maximum(std::span<const double> series, std::span<const double> times);

/// Throws NoMaximumError if either E_B or P has no interior maximum.
ChargingSummary summarize(const Trajectory& trajectory, const ProtocolConfig& config);

MetricSeries compute_metrics(const Trajectory& trajectory);

}  // namespace qbat
