#include "qbat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qbat {

double BlochVector::length() const { return std::sqrt(rx * rx + ry * ry + rz * rz); }

std::vector<double> stored_energy(std::span<const double> sz, double omega_z, int n_tls) {
  std::vector<double> e(sz.size());
  const double half_n = 0.5 * n_tls;
  for (std::size_t i = 0; i < sz.size(); ++i) e[i] = omega_z * (sz[i] + half_n);
  return e;
}

std::vector<double> averaged_power(std::span<const double> e_b, std::span<const double> times) {
  if (e_b.size() != times.size()) throw std::invalid_argument("energy and time series differ in length");
  std::vector<double> p(e_b.size());
  for (std::size_t i = 0; i < e_b.size(); ++i) p[i] = times[i] > 0.0 ? e_b[i] / times[i] : 0.0;
  return p;
}

std::vector<double> magnetization(std::span<const double> e_b, double omega_z, int n_tls) {
  std::vector<double> m(e_b.size());
  for (std::size_t i = 0; i < e_b.size(); ++i) m[i] = e_b[i] / omega_z - 0.5 * n_tls;
  return m;
}

BlochVector single_tls_rdm(double sx, double sy, double sz, int n_tls) {
  const double k = 2.0 / n_tls;
  return {k * sx, k * sy, k * sz};
}

BlochVector single_tls_rdm(const SpinState& state) {
  const cplx sp = expectation_splus(state.sector(), state.amplitudes());
  return single_tls_rdm(sp.real(), sp.imag(), expectation_sz(state), state.sector().n_tls());
}

double ergotropy_single(const BlochVector& bloch, double omega_z) {
  // E^(N)/N - r_1 w_z with E^(N)/N = (w_z/2)(r_z + 1) and r_1 = (1 - |r|)/2
  return std::max(0.0, 0.5 * omega_z * (bloch.rz + bloch.length()));
}

double ergotropy_general(std::span<const double> occupations, std::span<const double> levels,
                         const Eigen::MatrixXd& overlaps) {
  const std::size_t n = occupations.size();
  if (levels.size() != n || static_cast<std::size_t>(overlaps.rows()) != n ||
      static_cast<std::size_t>(overlaps.cols()) != n)
    throw std::invalid_argument("ergotropy inputs have inconsistent dimensions");
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (occupations[k] < -1e-12) throw std::invalid_argument("negative occupation");
    if (k > 0 && occupations[k] > occupations[k - 1])
      throw std::invalid_argument("occupations must be in descending order");
    if (k > 0 && levels[k] < levels[k - 1]) throw std::invalid_argument("levels must be in ascending order");
    total += occupations[k];
  }
  if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("occupations do not sum to 1");
  const Eigen::VectorXd rows = overlaps.rowwise().sum();
  const Eigen::VectorXd cols = overlaps.colwise().sum().transpose();
  if ((rows.array() - 1.0).abs().maxCoeff() > 1e-10 || (cols.array() - 1.0).abs().maxCoeff() > 1e-10)
    throw std::invalid_argument("overlap matrix is not doubly stochastic");

  double erg = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (occupations[k] == 0.0) continue;
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) acc += levels[m] * overlaps(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
    erg += occupations[k] * (acc - levels[k]);
  }
  return erg;
}

double total_ergotropy(const SpinState& state, double omega_z) {
  const auto& psi = state.amplitudes();
  const Eigen::MatrixXcd rho = psi * psi.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  const auto d = psi.size();

  // H_B = w_z S_z is diagonal in the m basis, already ascending.
  std::vector<double> levels = state.sector().m_values();
  for (double& e : levels) e *= omega_z;

  // Eigen returns ascending eigenvalues; the passive ordering wants descending.
  std::vector<double> occ(static_cast<std::size_t>(d));
  Eigen::MatrixXd overlaps(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = d - 1 - k;
    occ[static_cast<std::size_t>(k)] = std::max(0.0, es.eigenvalues()[src]);
    for (Eigen::Index n = 0; n < d; ++n) overlaps(k, n) = std::norm(es.eigenvectors()(n, src));
  }
  double sum = 0.0;
  for (double r : occ) sum += r;
  for (double& r : occ) r /= sum;
  return ergotropy_general(occ, levels, overlaps);
}

PeakSearch find_first_maximum(std::span<const double> series, std::span<const double> times) {
  if (series.size() != times.size()) throw std::invalid_argument("series and times differ in length");
  if (series.size() < 3) throw std::invalid_argument("need at least 3 samples to locate a maximum");

  PeakSearch out;
  const auto g = static_cast<std::size_t>(std::max_element(series.begin(), series.end()) - series.begin());
  out.global = {times[g], series[g]};

  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    // plateau tops count once, at their left edge
    if (!(series[i] > series[i - 1] && series[i] >= series[i + 1])) continue;
    const double y0 = series[i - 1], y1 = series[i], y2 = series[i + 1];
    const double t0 = times[i - 1], t1 = times[i], t2 = times[i + 1];
    // vertex of the parabola through the three samples (non-uniform spacing allowed)
    const double d0 = (y1 - y0) / (t1 - t0);
    const double d1 = (y2 - y1) / (t2 - t1);
    const double curv = (d1 - d0) / (t2 - t0);
    if (curv >= 0.0) {
      out.first = Peak{t1, y1};
    } else {
      const double slope_mid = d0 + curv * (t1 - t0);  // derivative at t1
      const double t_star = std::clamp(t1 - slope_mid / (2.0 * curv), t0, t2);
      const double value = y1 + slope_mid * (t_star - t1) + curv * (t_star - t1) * (t_star - t1);
      out.first = Peak{t_star, value};
    }
    break;
  }
  return out;
}

ChargingSummary summarize(const Trajectory& trajectory, const ProtocolConfig& config) {
  const int n = trajectory.sector.n_tls();
  const auto e = stored_energy(trajectory.sz, config.omega_z, n);
  const auto p = averaged_power(e, trajectory.times);
  const PeakSearch pe = find_first_maximum(e, trajectory.times);
  if (!pe.found())
    throw NoMaximumError("stored energy has no interior maximum within the horizon", pe.global);
  const PeakSearch pp = find_first_maximum(p, trajectory.times);
  if (!pp.found()) throw NoMaximumError("power has no interior maximum within the horizon", pp.global);
  return {n, config.g, pe.first->value, pe.first->time, pp.first->value, pp.first->time};
}

MetricSeries compute_metrics(const Trajectory& trajectory) {
  const int n = trajectory.sector.n_tls();
  MetricSeries ms;
  ms.times = trajectory.times;
  ms.e_b = stored_energy(trajectory.sz, trajectory.omega_z, n);
  ms.power = averaged_power(ms.e_b, ms.times);
  ms.magnetization = magnetization(ms.e_b, trajectory.omega_z, n);
  ms.ergotropy_single.resize(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i)
    ms.ergotropy_single[i] = ergotropy_single(
        single_tls_rdm(trajectory.sx[i], trajectory.sy[i], trajectory.sz[i], n), trajectory.omega_z);
  if (trajectory.states.size() == trajectory.size()) {
    ms.ergotropy_total.reserve(trajectory.size());
    for (const auto& st : trajectory.states) ms.ergotropy_total.push_back(total_ergotropy(st, trajectory.omega_z));
  }
  return ms;
}

}  // namespace qbat
