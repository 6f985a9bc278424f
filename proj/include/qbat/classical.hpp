#pragma once

// Mean-field (classical) limit of the LMG battery in rescaled, co-rotating
// variables q~ = cos(theta), p~ = phi + w_z t / 2:
//
//   dq~/dt =  (G/4) (1 - q~^2) sin(2 p~ - w_z t)
//   dp~/dt = -(G/2) q~ cos^2(p~ - w_z t / 2),        G = g N
//
// The south pole q~ = -1 is a fixed point, so charging needs a seed
// displacement (default q~(0) = -1 + 1e-3, p~(0) = 0).

#include <cstddef>
#include <vector>

namespace qbat {

struct ClassicalState {
  double q_tilde = -1.0 + 1e-3;
  double p_tilde = 0.0;
};

struct ClassicalDerivative {
  double dq = 0.0;
  double dp = 0.0;
};

/// Depends on (g, N) only through the product g * N.
ClassicalDerivative classical_rhs(const ClassicalState& state, double t, double g, int n_tls, double omega_z);

/// H_cl = (w_z/2) q - (g/4) N^2 cos^2 p + (g/4) q^2 cos^2 p, with q = N q~, p = p~ - w_z t/2.
double classical_energy(const ClassicalState& state, double t, double g, int n_tls, double omega_z);

struct ClassicalTrajectory {
  std::vector<double> t, q_tilde, p_tilde, h_cl;

  std::size_t size() const { return t.size(); }
};

/// 1e-3 / max(w_z, g N)
double default_classical_step(double g, int n_tls, double omega_z);

/// Fixed-step RK4 over [0, horizon]. The step count is ceil(horizon/dt), the
/// step itself horizon / count. Throws IntegrationError if |q~| > 1 + 1e-6.
ClassicalTrajectory integrate_classical(const ClassicalState& initial, double g, int n_tls, double omega_z,
                                        double horizon, double dt);

}  // namespace qbat
