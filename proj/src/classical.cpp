#include "qbat/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qbat/errors.hpp"

namespace qbat {

ClassicalDerivative classical_rhs(const ClassicalState& s, double t, double g, int n_tls, double omega_z) {
  const double big_g = g * n_tls;
  const double c = std::cos(s.p_tilde - 0.5 * omega_z * t);
  return {0.25 * big_g * (1.0 - s.q_tilde * s.q_tilde) * std::sin(2.0 * s.p_tilde - omega_z * t),
          -0.5 * big_g * s.q_tilde * c * c};
}

double classical_energy(const ClassicalState& s, double t, double g, int n_tls, double omega_z) {
  const double n = n_tls;
  const double q = n * s.q_tilde;
  const double c = std::cos(s.p_tilde - 0.5 * omega_z * t);
  return 0.5 * omega_z * q - 0.25 * g * n * n * c * c + 0.25 * g * q * q * c * c;
}

double default_classical_step(double g, int n_tls, double omega_z) {
  return 1e-3 / std::max(omega_z, g * n_tls);
}

ClassicalTrajectory integrate_classical(const ClassicalState& initial, double g, int n_tls, double omega_z,
                                        double horizon, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be non-negative");
  if (n_tls < 1) throw std::invalid_argument("need at least one two-level system");

  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(horizon / dt - 1e-9)));
  const double h = horizon / static_cast<double>(steps);

  ClassicalTrajectory out;
  out.t.reserve(steps + 1);
  out.q_tilde.reserve(steps + 1);
  out.p_tilde.reserve(steps + 1);
  out.h_cl.reserve(steps + 1);

  auto push = [&](const ClassicalState& s, double t) {
    out.t.push_back(t);
    out.q_tilde.push_back(s.q_tilde);
    out.p_tilde.push_back(s.p_tilde);
    out.h_cl.push_back(classical_energy(s, t, g, n_tls, omega_z));
  };
  auto f = [&](const ClassicalState& s, double t) { return classical_rhs(s, t, g, n_tls, omega_z); };
  auto shift = [](const ClassicalState& s, const ClassicalDerivative& d, double k) {
    return ClassicalState{s.q_tilde + k * d.dq, s.p_tilde + k * d.dp};
  };

  ClassicalState s = initial;
  push(s, 0.0);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = h * static_cast<double>(i);
    const auto k1 = f(s, t);
    const auto k2 = f(shift(s, k1, 0.5 * h), t + 0.5 * h);
    const auto k3 = f(shift(s, k2, 0.5 * h), t + 0.5 * h);
    const auto k4 = f(shift(s, k3, h), t + h);
    s.q_tilde += h / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    s.p_tilde += h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    if (std::abs(s.q_tilde) > 1.0 + 1e-6) {
      std::ostringstream msg;
      msg << "|q~| = " << std::abs(s.q_tilde) << " left the sphere at t = " << t + h << " with step " << h
          << "; retry with a smaller step (e.g. " << 0.25 * h << ")";
      throw IntegrationError(msg.str());
    }
    push(s, i + 1 == steps ? horizon : t + h);
  }
  return out;
}

}  // namespace qbat
