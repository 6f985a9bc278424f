#pragma once

// Collective pseudo-spin algebra in the maximal sector s = N/2.
//
// Basis states |s, m> are ordered by ascending m, index i <-> m = -s + i.
// Magnetic numbers are carried as the integer 2m so that half-integer spins
// never go through floating point.

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qbat {

using cplx = std::complex<double>;

class SpinSector {
 public:
  explicit SpinSector(int n_tls);

  int n_tls() const { return n_tls_; }
  std::size_t dim() const { return static_cast<std::size_t>(n_tls_) + 1; }
  int twice_s() const { return n_tls_; }
  double s() const { return 0.5 * n_tls_; }
  double casimir() const { return s() * (s() + 1.0); }

  int twice_m(std::size_t i) const { return -n_tls_ + 2 * static_cast<int>(i); }
  double m(std::size_t i) const { return 0.5 * twice_m(i); }
  std::vector<int> twice_m_values() const;
  std::vector<double> m_values() const;
  std::size_t index_of(int twice_m) const;

  /// <m+1| S_+ |m> for the basis state at index i (zero at the top).
  double raising(std::size_t i) const;

  bool operator==(const SpinSector&) const = default;

 private:
  int n_tls_;
};

SpinSector build_sector(int n_tls);

/// Real symmetric matrix. Writes go through set()/add(), which touch both
/// triangles, so entries(i, j) == entries(j, i) holds bit for bit.
class SymmetricOperator {
 public:
  SymmetricOperator() = default;
  explicit SymmetricOperator(std::size_t dim);
  static SymmetricOperator from_matrix(const Eigen::MatrixXd& m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v);
  void add(std::size_t i, std::size_t j, double v);
  const Eigen::MatrixXd& matrix() const { return m_; }

  /// Largest |i - j| with a nonzero entry.
  std::size_t bandwidth() const;
  SymmetricOperator restrict_to(const std::vector<std::size_t>& indices) const;
  bool is_symmetric() const;

  SymmetricOperator& operator+=(const SymmetricOperator& o);
  SymmetricOperator& operator*=(double a);
  friend SymmetricOperator operator+(SymmetricOperator a, const SymmetricOperator& b) { return a += b; }
  friend SymmetricOperator operator*(double a, SymmetricOperator op) { return op *= a; }

 private:
  Eigen::MatrixXd m_;
};

struct ParitySector {
  SpinSector parent;
  int parity_class;                  // parity of (m - m_min): 0 even, 1 odd
  std::vector<std::size_t> indices;  // ascending parent indices

  std::size_t dim() const { return indices.size(); }
  bool contains(std::size_t parent_index) const {
    return static_cast<int>(parent_index % 2) == parity_class;
  }
};

/// First sector holds |s, -s>.
std::pair<ParitySector, ParitySector> parity_split(const SpinSector& sector);

class SpinState {
 public:
  /// Throws std::invalid_argument unless the amplitudes have unit norm within 1e-12.
  SpinState(SpinSector sector, Eigen::VectorXcd amplitudes);

  const SpinSector& sector() const { return sector_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  double population(std::size_t i) const { return std::norm(amps_[static_cast<Eigen::Index>(i)]); }

 private:
  SpinSector sector_;
  Eigen::VectorXcd amps_;
};

SymmetricOperator op_sz(const SpinSector& sector);
SymmetricOperator op_sx(const SpinSector& sector);
SymmetricOperator op_sx2(const SpinSector& sector);

SpinState basis_state(const SpinSector& sector, std::size_t index);
SpinState ground_state(const SpinSector& sector);
SpinState max_state(const SpinSector& sector);

// Expectation values from ladder amplitudes; the vector overloads accept any
// amplitude vector of the sector dimension (not necessarily normalized).
cplx expectation_splus(const SpinSector& sector, const Eigen::VectorXcd& amps);
double expectation_sz(const SpinSector& sector, const Eigen::VectorXcd& amps);
double expectation_sz(const SpinState& state);
double expectation_sx(const SpinState& state);
double expectation_sy(const SpinState& state);

}  // namespace qbat
