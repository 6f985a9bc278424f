#include "qbat/perturbation.hpp"

#include <cmath>
#include <numbers>

namespace qbat {

double e_weak(double t, double g, double omega_z, int n_tls) {
  const double pairs = static_cast<double>(n_tls) * n_tls - n_tls;
  return g * g / 8.0 * (1.0 - std::cos(2.0 * omega_z * t)) / omega_z * pairs;
}

double p_weak(double t, double g, double omega_z, int n_tls) {
  if (t <= 0.0) return 0.0;
  return e_weak(t, g, omega_z, n_tls) / t;
}

namespace {

double bisect_power_phase() {
  // d/dx[(1 - cos 2x)/x] = 0  <=>  tan x = 2x; f changes sign once on (1, 1.5)
  auto f = [](double x) { return std::sin(x) - 2.0 * x * std::cos(x); };
  double lo = 1.0, hi = 1.5;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double weak_power_phase() {
  static const double x = bisect_power_phase();  // thread-safe initialization
  return x;
}

WeakCouplingPrediction weak_maxima(double g, double omega_z, int n_tls) {
  WeakCouplingPrediction w;
  w.g = g;
  w.omega_z = omega_z;
  w.n_tls = n_tls;
  w.t_e = std::numbers::pi / (2.0 * omega_z);
  w.e_max = g * g / (4.0 * omega_z) * (static_cast<double>(n_tls) * n_tls - n_tls);
  w.t_p = weak_power_phase() / omega_z;
  w.p_max = p_weak(w.t_p, g, omega_z, n_tls);
  return w;
}

}  // namespace qbat
