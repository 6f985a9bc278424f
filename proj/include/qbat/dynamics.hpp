#pragma once

// Battery Hamiltonian H = w_z S_z - g S_x^2, exact diagonalization and
// spectral propagation through the step protocol f(t) = 1 on [0, tau_c].

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qbat/spin.hpp"

namespace qbat {

struct ProtocolConfig {
  double omega_z = 1.0;
  double g = 0.0;
  double tau_c = std::numeric_limits<double>::infinity();  // infinity: never switched off
  std::vector<double> times;

  void validate() const;
};

/// samples points on [0, horizon], both ends included.
std::vector<double> uniform_grid(double horizon, std::size_t samples);

/// periods * 2 pi / max(w_z, g N): the grid follows the fast scale at strong coupling.
double default_horizon(int n_tls, double g, double omega_z = 1.0, double periods = 10.0);
std::vector<double> default_time_grid(int n_tls, double g, double omega_z = 1.0,
                                      std::size_t samples = 2000);

struct EigenSystem {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns

  std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

SymmetricOperator battery_hamiltonian(const SpinSector& sector, double omega_z);
/// Throws NegativeCouplingError for g < 0.
SymmetricOperator build_hamiltonian(const SpinSector& sector, double omega_z, double g);

EigenSystem diagonalize(const SymmetricOperator& op);
EigenSystem diagonalize_tridiagonal(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal);

/// max_k |H v_k - l_k v_k|
double eigen_residual(const SymmetricOperator& op, const EigenSystem& eig);
/// max |V^T V - 1|
double orthonormality_error(const EigenSystem& eig);

/// psi(t) = sum_k exp(-i l_k t) v_k (v_k^T psi0). Negative t runs backwards.
Eigen::VectorXcd propagate(const EigenSystem& eig, const Eigen::VectorXcd& psi0, double t);
SpinState propagate(const EigenSystem& eig, const SpinState& psi0, double t);

double expectation(const SymmetricOperator& op, const Eigen::VectorXcd& psi);

struct Trajectory {
  SpinSector sector{1};
  double omega_z = 1.0;
  double g = 0.0;
  double tau_c = std::numeric_limits<double>::infinity();
  std::vector<double> times;
  std::vector<double> sz, sx, sy;
  std::vector<SpinState> states;  // filled only with RunOptions::keep_states

  std::size_t size() const { return times.size(); }
};

struct RunOptions {
  bool keep_states = false;
  std::optional<SpinState> initial;  // defaults to |N/2, -N/2>
};

Trajectory run_protocol(const ProtocolConfig& config, const SpinSector& sector,
                        const RunOptions& options = {});

/// Same trajectory computed on the tridiagonal parity block. The initial state
/// must have no weight outside the block (std::invalid_argument otherwise).
Trajectory run_protocol_parity(const ProtocolConfig& config, const ParitySector& parity,
                               const RunOptions& options = {});

}  // namespace qbat
