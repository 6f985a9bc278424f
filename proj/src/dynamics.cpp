#include "qbat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qbat/errors.hpp"

namespace qbat {

void ProtocolConfig::validate() const {
  if (!(omega_z > 0.0)) throw std::invalid_argument("omega_z must be positive");
  if (g < 0.0) throw NegativeCouplingError(g);
  if (std::isnan(tau_c) || tau_c < 0.0) throw std::invalid_argument("tau_c must be >= 0");
  if (times.empty()) throw std::invalid_argument("time grid is empty");
  if (times.front() < 0.0) throw std::invalid_argument("sample times must be >= 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
}

std::vector<double> uniform_grid(double horizon, std::size_t samples) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  std::vector<double> t(samples);
  const double h = horizon / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) t[i] = h * static_cast<double>(i);
  t.back() = horizon;
  return t;
}

double default_horizon(int n_tls, double g, double omega_z, double periods) {
  const double w_eff = std::max(omega_z, g * n_tls);
  return periods * 2.0 * std::numbers::pi / w_eff;
}

std::vector<double> default_time_grid(int n_tls, double g, double omega_z, std::size_t samples) {
  return uniform_grid(default_horizon(n_tls, g, omega_z), samples);
}

SymmetricOperator battery_hamiltonian(const SpinSector& sector, double omega_z) {
  return omega_z * op_sz(sector);
}

SymmetricOperator build_hamiltonian(const SpinSector& sector, double omega_z, double g) {
  if (g < 0.0) throw NegativeCouplingError(g);
  return omega_z * op_sz(sector) + (-g) * op_sx2(sector);
}

namespace {

EigenSystem from_solver(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, std::size_t dim) {
  if (es.info() != Eigen::Success)
    throw ConvergenceError("symmetric eigensolver did not converge within " +
                               std::to_string(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>::m_maxIterations) +
                               " QR sweeps per eigenvalue (dimension " + std::to_string(dim) + ")",
                           dim);
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

EigenSystem diagonalize(const SymmetricOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix());
  return from_solver(es, op.dim());
}

EigenSystem diagonalize_tridiagonal(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal) {
  const auto n = diagonal.size();
  if (n == 0 || off_diagonal.size() != std::max<Eigen::Index>(n - 1, 0))
    throw std::invalid_argument("tridiagonal band sizes inconsistent");
  if (n == 1) return {diagonal, Eigen::MatrixXd::Identity(1, 1)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diagonal, off_diagonal, Eigen::ComputeEigenvectors);
  return from_solver(es, static_cast<std::size_t>(n));
}

double eigen_residual(const SymmetricOperator& op, const EigenSystem& eig) {
  const Eigen::MatrixXd r = op.matrix() * eig.eigenvectors - eig.eigenvectors * eig.eigenvalues.asDiagonal();
  return r.colwise().norm().maxCoeff();
}

double orthonormality_error(const EigenSystem& eig) {
  const auto n = eig.eigenvectors.cols();
  return (eig.eigenvectors.transpose() * eig.eigenvectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

Eigen::VectorXcd propagate(const EigenSystem& eig, const Eigen::VectorXcd& psi0, double t) {
  if (static_cast<std::size_t>(psi0.size()) != eig.dim())
    throw std::invalid_argument("state dimension does not match eigensystem");
  if (t == 0.0) return psi0;
  Eigen::VectorXcd c = eig.eigenvectors.transpose().cast<cplx>() * psi0;
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -eig.eigenvalues[k] * t);
  return eig.eigenvectors.cast<cplx>() * c;
}

SpinState propagate(const EigenSystem& eig, const SpinState& psi0, double t) {
  return SpinState(psi0.sector(), propagate(eig, psi0.amplitudes(), t));
}

double expectation(const SymmetricOperator& op, const Eigen::VectorXcd& psi) {
  return (psi.adjoint() * (op.matrix().cast<cplx>() * psi))(0).real();
}

namespace {

// Spectral propagator with the eigenbasis projection of psi0 cached.
class SpectralEvolver {
 public:
  SpectralEvolver(const EigenSystem& eig, const Eigen::VectorXcd& psi0)
      : eig_(eig), psi0_(psi0), vecs_(eig.eigenvectors.cast<cplx>()), coeff_(vecs_.transpose() * psi0) {}

  Eigen::VectorXcd at(double t) const {
    if (t == 0.0) return psi0_;
    Eigen::VectorXcd c = coeff_;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -eig_.eigenvalues[k] * t);
    return vecs_ * c;
  }

 private:
  const EigenSystem& eig_;
  Eigen::VectorXcd psi0_;
  Eigen::MatrixXcd vecs_;
  Eigen::VectorXcd coeff_;
};

// Free evolution under w_z S_z from psi(tau_c); S_z populations are untouched.
Eigen::VectorXcd free_evolve(const SpinSector& sector, double omega_z, const Eigen::VectorXcd& psi, double dt) {
  Eigen::VectorXcd out = psi;
  for (std::size_t i = 0; i < sector.dim(); ++i)
    out[static_cast<Eigen::Index>(i)] *= std::polar(1.0, -omega_z * sector.m(i) * dt);
  return out;
}

void record(Trajectory& traj, const Eigen::VectorXcd& psi, double t, bool keep) {
  const cplx sp = expectation_splus(traj.sector, psi);
  traj.times.push_back(t);
  traj.sz.push_back(expectation_sz(traj.sector, psi));
  traj.sx.push_back(sp.real());
  traj.sy.push_back(sp.imag());
  if (keep) traj.states.emplace_back(traj.sector, psi);
}

// Shared driver: `charge` maps psi0 -> psi(t) under the charging Hamiltonian.
template <class Charge>
Trajectory drive(const ProtocolConfig& config, const SpinSector& sector, bool keep, Charge&& charge) {
  Trajectory traj;
  traj.sector = sector;
  traj.omega_z = config.omega_z;
  traj.g = config.g;
  traj.tau_c = config.tau_c;
  traj.times.reserve(config.times.size());
  traj.sz.reserve(config.times.size());
  traj.sx.reserve(config.times.size());
  traj.sy.reserve(config.times.size());

  std::optional<Eigen::VectorXcd> at_switch_off;
  for (double t : config.times) {
    if (t <= config.tau_c) {
      record(traj, charge(t), t, keep);
    } else {
      if (!at_switch_off) at_switch_off = charge(config.tau_c);
      record(traj, free_evolve(sector, config.omega_z, *at_switch_off, t - config.tau_c), t, keep);
    }
  }
  return traj;
}

}  // namespace

Trajectory run_protocol(const ProtocolConfig& config, const SpinSector& sector, const RunOptions& options) {
  config.validate();
  const SpinState psi0 = options.initial.value_or(ground_state(sector));
  if (!(psi0.sector() == sector)) throw std::invalid_argument("initial state belongs to a different sector");

  const EigenSystem eig = diagonalize(build_hamiltonian(sector, config.omega_z, config.g));
  const SpectralEvolver evolver(eig, psi0.amplitudes());
  return drive(config, sector, options.keep_states, [&](double t) { return evolver.at(t); });
}

Trajectory run_protocol_parity(const ProtocolConfig& config, const ParitySector& parity,
                               const RunOptions& options) {
  config.validate();
  const SpinSector& sector = parity.parent;
  const SpinState psi0 = options.initial.value_or(ground_state(sector));
  if (!(psi0.sector() == sector)) throw std::invalid_argument("initial state belongs to a different sector");
  for (std::size_t i = 0; i < sector.dim(); ++i)
    if (!parity.contains(i) && psi0.population(i) != 0.0)
      throw std::invalid_argument("initial state has weight outside the parity sector");

  // Within a parity block S_x^2 only couples neighbours, so the block is tridiagonal.
  const SymmetricOperator block =
      build_hamiltonian(sector, config.omega_z, config.g).restrict_to(parity.indices);
  const auto d = static_cast<Eigen::Index>(block.dim());
  Eigen::VectorXd diag(d), off(std::max<Eigen::Index>(d - 1, 0));
  for (Eigen::Index i = 0; i < d; ++i) diag[i] = block(i, i);
  for (Eigen::Index i = 0; i + 1 < d; ++i) off[i] = block(i, i + 1);
  const EigenSystem eig = diagonalize_tridiagonal(diag, off);

  Eigen::VectorXcd reduced(d);
  for (Eigen::Index a = 0; a < d; ++a) reduced[a] = psi0.amplitudes()[static_cast<Eigen::Index>(parity.indices[a])];
  const SpectralEvolver evolver(eig, reduced);

  return drive(config, sector, options.keep_states, [&](double t) {
    const Eigen::VectorXcd r = evolver.at(t);
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sector.dim()));
    for (Eigen::Index a = 0; a < d; ++a) full[static_cast<Eigen::Index>(parity.indices[a])] = r[a];
    return full;
  });
}

}  // namespace qbat
