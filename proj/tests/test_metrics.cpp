#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "qbat/metrics.hpp"

using namespace qbat;

namespace {

ProtocolConfig config(double g, double horizon, std::size_t samples) {
  ProtocolConfig c;
  c.g = g;
  c.times = uniform_grid(horizon, samples);
  return c;
}

/// Symmetric-subspace amplitudes embedded into (C^2)^{(x) n}.
Eigen::VectorXcd embed(const Eigen::VectorXcd& amps, int n) {
  const oracle::cmat sm = oracle::collective('x', n) - oracle::cplx(0, 1) * oracle::collective('y', n);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index(1) << n);
  v[v.size() - 1] = 1.0;
  Eigen::VectorXcd big = Eigen::VectorXcd::Zero(v.size());
  for (int k = n; k >= 0; --k) {
    big += amps[k] * v.normalized();
    v = sm * v;
  }
  return big;
}

}  // namespace

TEST_CASE("stored energy, power and magnetization") {
  const std::vector<double> sz{-2.0, -1.5, 0.0};
  const std::vector<double> t{0.0, 0.5, 2.0};
  const auto e = stored_energy(sz, 1.0, 4);
  CHECK(e == std::vector<double>{0.0, 0.5, 2.0});
  const auto p = averaged_power(e, t);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.0);
  CHECK(p[2] == 1.0);
  CHECK(magnetization(e, 1.0, 4) == sz);
  CHECK_THROWS_AS(averaged_power(e, std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("single-TLS Bloch vector matches the partial trace") {
  const int n = 4;
  const SpinSector s(n);
  Eigen::VectorXcd amps(n + 1);
  for (int k = 0; k <= n; ++k) amps[k] = oracle::cplx(0.3 + std::sin(2.1 * k), std::cos(0.9 * k));
  amps.normalize();
  const SpinState st(s, amps);
  const auto rho = oracle::first_qubit_rdm(embed(amps, n), n);
  const auto r = single_tls_rdm(st);
  for (char axis : {'x', 'y', 'z'}) {
    const double ref = (rho * oracle::pauli(axis)).trace().real();
    const double got = axis == 'x' ? r.rx : axis == 'y' ? r.ry : r.rz;
    CHECK(got == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("single-TLS ergotropy") {
  CHECK(ergotropy_single({0, 0, -1}, 1.0) == 0.0);
  CHECK(ergotropy_single({0, 0, 1}, 1.0) == 1.0);
  CHECK(ergotropy_single({0, 0, 0.4}, 2.0) == doctest::Approx(0.8));
  CHECK(ergotropy_single({0, 0, -0.4}, 1.0) == 0.0);
  // a pure state on the equator: half the splitting
  CHECK(ergotropy_single({1, 0, 0}, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("general ergotropy of a two-level example") {
  const std::vector<double> r{0.7, 0.3};
  const std::vector<double> e{-1.0, 1.0};
  CHECK(ergotropy_general(r, e, Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(0.0));
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(ergotropy_general(r, e, swap) == doctest::Approx(0.8));
}

TEST_CASE("general ergotropy validates its inputs") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(ergotropy_general(std::vector<double>{0.3, 0.7}, std::vector<double>{0, 1}, id),
                  std::invalid_argument);
  CHECK_THROWS_AS(ergotropy_general(std::vector<double>{0.7, 0.3}, std::vector<double>{1, 0}, id),
                  std::invalid_argument);
  CHECK_THROWS_AS(ergotropy_general(std::vector<double>{0.7, 0.2}, std::vector<double>{0, 1}, id),
                  std::invalid_argument);
  Eigen::MatrixXd bad = id;
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(ergotropy_general(std::vector<double>{0.7, 0.3}, std::vector<double>{0, 1}, bad),
                  std::invalid_argument);
  CHECK_THROWS_AS(ergotropy_general(std::vector<double>{1.0}, std::vector<double>{0, 1}, id), std::invalid_argument);
}

TEST_CASE("pure-state ergotropy equals the stored energy; local ergotropy is bounded by it") {
  for (int n : {2, 5, 12}) {
    RunOptions opts;
    opts.keep_states = true;
    const auto traj = run_protocol(config(1.0, 6.0, 120), SpinSector(n), opts);
    const auto m = compute_metrics(traj);
    REQUIRE(m.ergotropy_total.size() == traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
      CHECK(std::abs(m.ergotropy_total[i] - m.e_b[i]) < 1e-9);
      CHECK(std::abs(m.ergotropy_single[i] - std::max(0.0, 2.0 * traj.sz[i] / n)) < 1e-9);
      CHECK(n * m.ergotropy_single[i] <= m.ergotropy_total[i] + 1e-9);
    }
  }
}

TEST_CASE("total ergotropy needs retained states") {
  const auto traj = run_protocol(config(1.0, 2.0, 10), SpinSector(3));
  CHECK(compute_metrics(traj).ergotropy_total.empty());
}

TEST_CASE("peak search refines a sampled parabola exactly") {
  std::vector<double> t, y;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(0.1 * i);
    y.push_back(3.0 - std::pow(0.1 * i - 0.737, 2));
  }
  const auto pk = find_first_maximum(y, t);
  REQUIRE(pk.found());
  CHECK(pk.first->time == doctest::Approx(0.737).epsilon(1e-12));
  CHECK(pk.first->value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("peak search takes the earliest local maximum") {
  std::vector<double> t, y;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.01 * i);
    y.push_back(std::sin(3.0 * t.back()) * (1.0 + 0.3 * t.back()));
  }
  const auto pk = find_first_maximum(y, t);
  REQUIRE(pk.found());
  CHECK(pk.first->time < 1.0);
  CHECK(pk.global.time > 2.0);
}

TEST_CASE("monotone series has no interior maximum") {
  const std::vector<double> t{0, 1, 2, 3};
  const std::vector<double> y{0, 1, 2, 3};
  const auto pk = find_first_maximum(y, t);
  CHECK_FALSE(pk.found());
  CHECK(pk.global.value == 3.0);
  CHECK_THROWS_AS(find_first_maximum(std::vector<double>{1, 2}, std::vector<double>{0, 1}), std::invalid_argument);
}

TEST_CASE("summary at N = 2 reproduces the Rabi maximum") {
  const auto cfg = config(1.0, 4.0, 4001);
  const auto traj = run_protocol(cfg, SpinSector(2));
  const auto s = summarize(traj, cfg);
  CHECK(s.e_max == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(s.t_e == doctest::Approx(std::numbers::pi / (2.0 * std::sqrt(1.25))).epsilon(1e-7));
  CHECK(s.p_max > 0.0);
  CHECK(s.t_p < s.t_e);
}

TEST_CASE("summary reports a missing maximum") {
  const auto cfg = config(1e-3, 0.5, 50);
  const auto traj = run_protocol(cfg, SpinSector(4));
  CHECK_THROWS_AS(summarize(traj, cfg), NoMaximumError);
}
