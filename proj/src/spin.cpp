#include "qbat/spin.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qbat/errors.hpp"

namespace qbat {

NegativeCouplingError::NegativeCouplingError(double g)
    : std::invalid_argument("coupling g must be non-negative, got " + std::to_string(g)), g_(g) {}

SpinSector::SpinSector(int n_tls) : n_tls_(n_tls) {
  if (n_tls < 1) throw std::invalid_argument("a battery needs at least one two-level system");
}

std::vector<int> SpinSector::twice_m_values() const {
  std::vector<int> out(dim());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = twice_m(i);
  return out;
}

std::vector<double> SpinSector::m_values() const {
  std::vector<double> out(dim());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = m(i);
  return out;
}

std::size_t SpinSector::index_of(int tm) const {
  if (tm < -n_tls_ || tm > n_tls_ || (tm + n_tls_) % 2 != 0)
    throw std::invalid_argument("2m = " + std::to_string(tm) + " not in sector");
  return static_cast<std::size_t>((tm + n_tls_) / 2);
}

double SpinSector::raising(std::size_t i) const {
  if (i + 1 >= dim()) return 0.0;
  // s(s+1) - m(m+1) = (N(N+2) - 2m(2m+2)) / 4, integer numerator
  const long long tm = twice_m(i);
  const long long num = static_cast<long long>(n_tls_) * (n_tls_ + 2) - tm * (tm + 2);
  return 0.5 * std::sqrt(static_cast<double>(num));
}

SpinSector build_sector(int n_tls) { return SpinSector(n_tls); }

SymmetricOperator::SymmetricOperator(std::size_t dim)
    : m_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))) {}

SymmetricOperator SymmetricOperator::from_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("operator matrix must be square");
  SymmetricOperator op;
  op.m_ = m;
  if (!op.is_symmetric()) throw std::invalid_argument("operator matrix is not symmetric");
  return op;
}

void SymmetricOperator::set(std::size_t i, std::size_t j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

void SymmetricOperator::add(std::size_t i, std::size_t j, double v) {
  m_(i, j) += v;
  if (i != j) m_(j, i) = m_(i, j);
}

std::size_t SymmetricOperator::bandwidth() const {
  std::size_t bw = 0;
  for (Eigen::Index j = 0; j < m_.cols(); ++j)
    for (Eigen::Index i = j; i < m_.rows(); ++i)
      if (m_(i, j) != 0.0) bw = std::max<std::size_t>(bw, static_cast<std::size_t>(i - j));
  return bw;
}

SymmetricOperator SymmetricOperator::restrict_to(const std::vector<std::size_t>& indices) const {
  SymmetricOperator out(indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a)
    for (std::size_t b = a; b < indices.size(); ++b) out.set(a, b, m_(indices[a], indices[b]));
  return out;
}

bool SymmetricOperator::is_symmetric() const {
  for (Eigen::Index j = 0; j < m_.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m_.rows(); ++i)
      if (m_(i, j) != m_(j, i)) return false;
  return true;
}

SymmetricOperator& SymmetricOperator::operator+=(const SymmetricOperator& o) {
  if (o.dim() != dim()) throw std::invalid_argument("operator dimensions differ");
  m_ += o.m_;
  return *this;
}

SymmetricOperator& SymmetricOperator::operator*=(double a) {
  m_ *= a;
  return *this;
}

std::pair<ParitySector, ParitySector> parity_split(const SpinSector& sector) {
  ParitySector even{sector, 0, {}};
  ParitySector odd{sector, 1, {}};
  for (std::size_t i = 0; i < sector.dim(); ++i) (i % 2 == 0 ? even : odd).indices.push_back(i);
  return {std::move(even), std::move(odd)};
}

SpinState::SpinState(SpinSector sector, Eigen::VectorXcd amplitudes)
    : sector_(sector), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != sector_.dim())
    throw std::invalid_argument("amplitude vector does not match sector dimension");
  const double norm = amps_.norm();
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::invalid_argument("spin state is not normalized (norm " + std::to_string(norm) + ")");
}

SymmetricOperator op_sz(const SpinSector& sector) {
  SymmetricOperator op(sector.dim());
  for (std::size_t i = 0; i < sector.dim(); ++i) op.set(i, i, sector.m(i));
  return op;
}

SymmetricOperator op_sx(const SpinSector& sector) {
  SymmetricOperator op(sector.dim());
  for (std::size_t i = 0; i + 1 < sector.dim(); ++i) op.set(i, i + 1, 0.5 * sector.raising(i));
  return op;
}

SymmetricOperator op_sx2(const SpinSector& sector) {
  // S_x^2 = (S_+^2 + S_-^2 + S_+S_- + S_-S_+) / 4, with S_+S_- + S_-S_+ = 2(S^2 - S_z^2)
  SymmetricOperator op(sector.dim());
  const double c = sector.casimir();
  for (std::size_t i = 0; i < sector.dim(); ++i) {
    const double m = sector.m(i);
    op.set(i, i, 0.5 * (c - m * m));
    if (i + 2 < sector.dim()) op.set(i, i + 2, 0.25 * sector.raising(i) * sector.raising(i + 1));
  }
  return op;
}

SpinState basis_state(const SpinSector& sector, std::size_t index) {
  if (index >= sector.dim()) throw std::invalid_argument("basis index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sector.dim()));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return SpinState(sector, std::move(v));
}

SpinState ground_state(const SpinSector& sector) { return basis_state(sector, 0); }

SpinState max_state(const SpinSector& sector) { return basis_state(sector, sector.dim() - 1); }

cplx expectation_splus(const SpinSector& sector, const Eigen::VectorXcd& amps) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i + 1 < sector.dim(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    acc += std::conj(amps[k + 1]) * sector.raising(i) * amps[k];
  }
  return acc;
}

double expectation_sz(const SpinSector& sector, const Eigen::VectorXcd& amps) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sector.dim(); ++i) acc += sector.m(i) * std::norm(amps[static_cast<Eigen::Index>(i)]);
  return acc;
}

double expectation_sz(const SpinState& state) { return expectation_sz(state.sector(), state.amplitudes()); }

double expectation_sx(const SpinState& state) {
  return expectation_splus(state.sector(), state.amplitudes()).real();
}

// <S_y> = (<S_+> - <S_->) / 2i = Im <S_+>
double expectation_sy(const SpinState& state) {
  return expectation_splus(state.sector(), state.amplitudes()).imag();
}

}  // namespace qbat
