#pragma once

// Second-order (Dyson series) weak-coupling predictions for the stored energy
// and averaged power, starting from |N/2, -N/2>.

namespace qbat {

/// (g^2/8)(1 - cos 2 w_z t)/w_z (N^2 - N)
double e_weak(double t, double g, double omega_z, int n_tls);
/// e_weak(t)/t, with the t -> 0 limit 0.
double p_weak(double t, double g, double omega_z, int n_tls);

/// Root of tan x = 2x in (1, 1.5): w_z t_P of the weak-coupling power.
/// Bisection to 1e-12, computed once.
double weak_power_phase();

struct WeakCouplingPrediction {
  double g = 0.0;
  double omega_z = 1.0;
  int n_tls = 1;
  double e_max = 0.0;
  double t_e = 0.0;
  double p_max = 0.0;
  double t_p = 0.0;

  double energy(double t) const { return e_weak(t, g, omega_z, n_tls); }
  double power(double t) const { return p_weak(t, g, omega_z, n_tls); }
};

WeakCouplingPrediction weak_maxima(double g, double omega_z, int n_tls);

}  // namespace qbat
