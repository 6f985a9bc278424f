#include <cmath>

#include "doctest.h"
#include "qbat/classical.hpp"
#include "qbat/errors.hpp"

using namespace qbat;

TEST_CASE("right-hand side depends on g and N only through G") {
  const ClassicalState s{-0.3, 0.8};
  const auto a = classical_rhs(s, 0.7, 0.25, 8, 1.0);
  const auto b = classical_rhs(s, 0.7, 0.5, 4, 1.0);
  const auto c = classical_rhs(s, 0.7, 2.0, 1, 1.0);
  CHECK(a.dq == b.dq);
  CHECK(a.dp == b.dp);
  CHECK(a.dq == c.dq);
  CHECK(a.dp == c.dp);
}

TEST_CASE("right-hand side closed form") {
  const ClassicalState s{0.2, 0.4};
  const double t = 0.3, big_g = 1.5;
  const auto d = classical_rhs(s, t, 0.5, 3, 1.0);
  CHECK(d.dq == doctest::Approx(big_g / 4 * (1 - 0.04) * std::sin(0.8 - t)));
  CHECK(d.dp == doctest::Approx(-big_g / 2 * 0.2 * std::pow(std::cos(0.4 - t / 2), 2)));
}

TEST_CASE("the south pole is a fixed point") {
  const auto tr = integrate_classical({-1.0, 0.3}, 1.0, 20, 1.0, 5.0, 1e-3);
  for (double q : tr.q_tilde) CHECK(q == -1.0);
}

TEST_CASE("RK4 error drops by about 16 per step halving") {
  const ClassicalState s0{-0.9, 0.1};
  const double g = 0.1, horizon = 4.0;
  const int n = 10;
  const auto ref = integrate_classical(s0, g, n, 1.0, horizon, 1e-4);
  auto err = [&](double dt) {
    const auto tr = integrate_classical(s0, g, n, 1.0, horizon, dt);
    return std::hypot(tr.q_tilde.back() - ref.q_tilde.back(), tr.p_tilde.back() - ref.p_tilde.back());
  };
  const double ratio = err(0.04) / err(0.02);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("the lab-frame energy is conserved") {
  const auto tr = integrate_classical({-0.5, 0.2}, 0.05, 40, 1.0, 20.0, 1e-3);
  for (std::size_t i = 0; i < tr.size(); ++i) CHECK(std::abs(tr.h_cl[i] - tr.h_cl[0]) < 1e-9 * std::abs(tr.h_cl[0]));
}

TEST_CASE("grid covers the horizon exactly") {
  const auto tr = integrate_classical({}, 1.0, 5, 1.0, 1.0, 0.3);
  CHECK(tr.size() == 5);
  CHECK(tr.t.back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(default_classical_step(1.0, 5, 1.0) == doctest::Approx(2e-4));
  CHECK(default_classical_step(1e-3, 5, 1.0) == doctest::Approx(1e-3));
}

TEST_CASE("a step far too large is reported") {
  CHECK_THROWS_AS(integrate_classical({-0.999, 0.0}, 10.0, 10, 1.0, 50.0, 2.0), IntegrationError);
}
