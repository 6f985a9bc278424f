#include "qbat/dicke.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbat/dynamics.hpp"
#include "qbat/errors.hpp"
#include "qbat/metrics.hpp"

namespace qbat {

void DickeConfig::validate() const {
  if (n_tls < 1) throw std::invalid_argument("a battery needs at least one two-level system");
  if (!(omega_z > 0.0)) throw std::invalid_argument("omega_z must be positive");
  if (!(omega_c > omega_z)) throw std::invalid_argument("omega_c must exceed omega_z");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  if (initial_photons < 0) throw std::invalid_argument("initial photon number must be >= 0");
  if (n_max < initial_photons + truncation_margin())
    throw TruncationError("Fock truncation n_max=" + std::to_string(n_max) + " too small: need at least " +
                          std::to_string(initial_photons + truncation_margin()));
}

ProductState::ProductState(const DickeConfig& config, Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != config.dim())
    throw std::invalid_argument("amplitude vector does not match product dimension");
  if (std::abs(amps_.norm() - 1.0) > 1e-12) throw std::invalid_argument("product state is not normalized");
}

double ProductState::photon_population(const DickeConfig& config, int n) const {
  double p = 0.0;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(config.n_tls); ++i)
    p += std::norm(amps_[static_cast<Eigen::Index>(config.index(i, n))]);
  return p;
}

ProductState dicke_initial_state(const DickeConfig& config) {
  config.validate();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(config.dim()));
  v[static_cast<Eigen::Index>(config.index(0, config.initial_photons))] = 1.0;
  return ProductState(config, std::move(v));
}

namespace {

// Photon matrices built on a padded space and cropped, so products such as
// (a + a^dag)^2 are exact on every retained level.
Eigen::MatrixXd annihilation(int levels) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXd crop(const Eigen::MatrixXd& m, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return m.topLeftCorner(d, d);
}

SymmetricOperator kron(const Eigen::MatrixXd& spin, const Eigen::MatrixXd& photon) {
  const auto ds = spin.rows(), dp = photon.rows();
  Eigen::MatrixXd out(ds * dp, ds * dp);
  for (Eigen::Index i = 0; i < ds; ++i)
    for (Eigen::Index j = 0; j < ds; ++j) out.block(i * dp, j * dp, dp, dp) = spin(i, j) * photon;
  // symmetrize bit-exactly: the factors are symmetric, rounding is not
  const Eigen::MatrixXd sym = 0.5 * (out + out.transpose());
  return SymmetricOperator::from_matrix(sym);
}

struct PhotonOps {
  Eigen::MatrixXd identity, number, quadrature, quadrature_sq;  // quadrature: a+a^dag or a^2+a^dag^2
  Eigen::MatrixXd anticommutator;                               // a a^dag + a^dag a
};

PhotonOps photon_ops(const DickeConfig& c) {
  const int pad = 4;
  const Eigen::MatrixXd a = annihilation(c.n_max + 1 + pad);
  const Eigen::MatrixXd ad = a.transpose();
  const Eigen::MatrixXd q = c.kind == CouplingKind::single_photon ? Eigen::MatrixXd(a + ad) : Eigen::MatrixXd(a * a + ad * ad);
  const std::size_t d = c.photon_dim();
  return {Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)),
          crop(ad * a, d), crop(q, d), crop(q * q, d), crop(a * ad + ad * a, d)};
}

}  // namespace

SymmetricOperator sz_product(const DickeConfig& config) {
  const SpinSector sector(config.n_tls);
  return kron(op_sz(sector).matrix(), photon_ops(config).identity);
}

SymmetricOperator dicke_free(const DickeConfig& config) {
  config.validate();
  const SpinSector sector(config.n_tls);
  const PhotonOps ph = photon_ops(config);
  const auto ds = static_cast<Eigen::Index>(sector.dim());
  return config.omega_z * kron(op_sz(sector).matrix(), ph.identity) +
         config.omega_c * kron(Eigen::MatrixXd::Identity(ds, ds), ph.number);
}

SymmetricOperator dicke_coupling(const DickeConfig& config) {
  config.validate();
  const SpinSector sector(config.n_tls);
  return (2.0 * config.lambda) * kron(op_sx(sector).matrix(), photon_ops(config).quadrature);
}

SymmetricOperator build_dicke(const DickeConfig& config) { return dicke_free(config) + dicke_coupling(config); }

SymmetricOperator effective_dispersive(const DickeConfig& config) {
  config.validate();
  const SpinSector sector(config.n_tls);
  const PhotonOps ph = photon_ops(config);
  const auto ds = static_cast<Eigen::Index>(sector.dim());
  const double l2 = config.lambda * config.lambda;
  const double wz = config.omega_z, wc = config.omega_c;
  const double den = wc * wc - wz * wz;
  const double photon_energy = config.kind == CouplingKind::two_photon ? 0.5 * wc : wc;
  const Eigen::MatrixXd sx2_photon = config.kind == CouplingKind::two_photon ? ph.anticommutator : ph.identity;

  return wz * kron(op_sz(sector).matrix(), ph.identity) +
         photon_energy * kron(Eigen::MatrixXd::Identity(ds, ds), ph.number) +
         (-2.0 * l2 * wz / den) * kron(op_sz(sector).matrix(), ph.quadrature_sq) +
         (-4.0 * l2 * wc / den) * kron(op_sx2(sector).matrix(), sx2_photon);
}

LmgMapping map_to_lmg(const DickeConfig& config) {
  LmgMapping m;
  const double base = 4.0 * config.lambda * config.lambda / config.omega_c;
  if (config.kind == CouplingKind::two_photon) {
    m.g = base * (2.0 * config.initial_photons + 1.0);
    m.constant_shift = 0.5 * config.omega_c * config.initial_photons;
  } else {
    m.g = base;
    m.constant_shift = config.omega_c * config.initial_photons;
  }
  m.dispersive_ratio = config.lambda / std::abs(config.omega_c - config.omega_z);
  return m;
}

Eigen::MatrixXd sw_generator(const SymmetricOperator& h0, const SymmetricOperator& v) {
  const std::size_t d = h0.dim();
  if (v.dim() != d) throw std::invalid_argument("H0 and V dimensions differ");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j && h0(i, j) != 0.0) throw std::invalid_argument("H0 must be diagonal");
      if (v(i, j) == 0.0) continue;
      const double gap = h0(i, i) - h0(j, j);
      if (std::abs(gap) < 1e-12) throw std::invalid_argument("V couples degenerate levels of H0");
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v(i, j) / gap;
    }
  return s;
}

Eigen::MatrixXd orthogonal_exp(const Eigen::MatrixXd& a) {
  // i A is Hermitian: exp(A) = W exp(-i mu) W^dag
  const Eigen::MatrixXcd h = cplx(0.0, 1.0) * a.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("eigensolver failed in matrix exponential", static_cast<std::size_t>(a.rows()));
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases[k] = std::polar(1.0, -es.eigenvalues()[k]);
  return (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint()).real();
}

namespace {

struct Deviation {
  double max = 0.0, rms = 0.0;
};

Deviation relative_deviation(const std::vector<double>& a, const std::vector<double>& b, double scale) {
  Deviation d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = std::abs(a[i] - b[i]);
    d.max = std::max(d.max, e);
    d.rms += e * e;
  }
  d.rms = std::sqrt(d.rms / static_cast<double>(a.size()));
  if (scale > 0.0) {
    d.max /= scale;
    d.rms /= scale;
  }
  return d;
}

double relative_change(double value, double reference) {
  if (reference == 0.0) return value == 0.0 ? 0.0 : std::abs(value);
  return std::abs(value - reference) / std::abs(reference);
}

}  // namespace

MappingReport validate_mapping(const DickeConfig& config, double horizon, std::size_t samples) {
  config.validate();
  MappingReport rep;
  const LmgMapping mapping = map_to_lmg(config);
  rep.g_mapped = mapping.g;
  rep.dispersive_ratio = mapping.dispersive_ratio;
  rep.regime_ok = mapping.dispersive_ratio <= kDispersiveRatioLimit;
  rep.times = uniform_grid(horizon, samples);

  const SymmetricOperator h0 = dicke_free(config);
  const SymmetricOperator v = dicke_coupling(config);
  const EigenSystem eig = diagonalize(h0 + v);
  const Eigen::MatrixXd u = orthogonal_exp(sw_generator(h0, v));
  const SymmetricOperator sz = sz_product(config);
  const Eigen::MatrixXd sz_dressed = u.transpose() * sz.matrix() * u;

  const Eigen::VectorXcd psi0 = dicke_initial_state(config).amplitudes();
  const Eigen::VectorXcd phi0 = u.transpose().cast<cplx>() * psi0;

  const double half_n = 0.5 * config.n_tls;
  auto leakage = [&](const Eigen::VectorXcd& psi) {
    double top = 0.0;
    for (int n = std::max(0, config.n_max - 1); n <= config.n_max; ++n)
      for (std::size_t i = 0; i <= static_cast<std::size_t>(config.n_tls); ++i)
        top += std::norm(psi[static_cast<Eigen::Index>(config.index(i, n))]);
    return top;
  };

  rep.e_full.reserve(samples);
  rep.e_bare.reserve(samples);
  for (double t : rep.times) {
    const Eigen::VectorXcd phi = propagate(eig, phi0, t);
    const Eigen::VectorXcd psi = propagate(eig, psi0, t);
    rep.e_full.push_back(config.omega_z * ((phi.adjoint() * sz_dressed.cast<cplx>() * phi)(0).real() + half_n));
    rep.e_bare.push_back(config.omega_z * (expectation(sz, psi) + half_n));
    rep.leakage = std::max({rep.leakage, leakage(phi), leakage(psi)});
  }
  rep.truncation_ok = rep.leakage <= kLeakageLimit;

  const SpinSector sector(config.n_tls);
  ProtocolConfig lmg;
  lmg.omega_z = config.omega_z;
  lmg.g = mapping.g;
  lmg.times = rep.times;
  rep.e_lmg = stored_energy(run_protocol(lmg, sector).sz, config.omega_z, config.n_tls);

  const double scale = *std::max_element(rep.e_lmg.begin(), rep.e_lmg.end());
  const Deviation dressed = relative_deviation(rep.e_full, rep.e_lmg, scale);
  const Deviation bare = relative_deviation(rep.e_bare, rep.e_lmg, scale);
  rep.dev_max = dressed.max;
  rep.dev_rms = dressed.rms;
  rep.bare_dev_max = bare.max;
  rep.bare_dev_rms = bare.rms;

  const PeakSearch pf = find_first_maximum(rep.e_full, rep.times);
  const PeakSearch pl = find_first_maximum(rep.e_lmg, rep.times);
  rep.maxima_found = pf.found() && pl.found();
  if (rep.maxima_found) {
    rep.e_max_full = pf.first->value;
    rep.t_e_full = pf.first->time;
    rep.e_max_lmg = pl.first->value;
    rep.t_e_lmg = pl.first->time;
    rep.e_max_dev = relative_change(rep.e_max_full, rep.e_max_lmg);
    rep.t_e_dev = relative_change(rep.t_e_full, rep.t_e_lmg);
  } else if (scale == 0.0 && rep.dev_max == 0.0) {
    // no coupling: both curves stay at zero
    rep.maxima_found = true;
  }
  return rep;
}

}  // namespace qbat
