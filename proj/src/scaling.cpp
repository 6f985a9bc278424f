#include "qbat/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "qbat/dynamics.hpp"

namespace qbat {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

void SweepSpec::validate() const {
  if (g_values.empty() || n_values.empty()) throw std::invalid_argument("sweep needs at least one g and one N");
  for (double g : g_values)
    if (g < 0.0) throw std::invalid_argument("couplings must be non-negative");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 1) throw std::invalid_argument("N must be positive");
    if (i > 0 && n_values[i] <= n_values[i - 1]) throw std::invalid_argument("N values must be ascending");
  }
  if (grid.samples < 3) throw std::invalid_argument("grid needs at least 3 samples");
}

ChargingSummary charging_point(int n_tls, double g, const GridPolicy& grid) {
  const SpinSector sector(n_tls);
  ProtocolConfig config;
  config.omega_z = grid.omega_z;
  config.g = g;
  const double horizon = grid.horizon.value_or(default_horizon(n_tls, g, grid.omega_z, grid.periods));
  config.times = uniform_grid(horizon, grid.samples);
  const auto [even, odd] = parity_split(sector);
  return summarize(run_protocol_parity(config, even), config);
}

std::vector<SweepPoint> sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepPoint> points;
  for (int n : spec.n_values)
    for (double g : spec.g_values) points.push_back({n, g, std::nullopt, "pending"});
  std::stable_sort(points.begin(), points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) { return std::tie(a.n_tls, a.g) < std::tie(b.n_tls, b.g); });

  parallel_for(points.size(), spec.jobs, [&](std::size_t i) {
    SweepPoint& p = points[i];
    try {
      p.summary = charging_point(p.n_tls, p.g, spec.grid);
      p.status = "ok";
    } catch (const NoMaximumError&) {
      p.status = "no-maximum";
    } catch (const std::exception& e) {
      p.status = std::string("error: ") + e.what();
    }
  });
  return points;
}

namespace {

struct LineFit {
  double intercept = 0.0, slope = 0.0, rms = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.rms += r * r;
  }
  f.rms = std::sqrt(f.rms / n);
  return f;
}

LineFit log_fit(std::span<const double> n, std::span<const double> y, double offset) {
  std::vector<double> lx(n.size()), ly(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    lx[i] = std::log(n[i]);
    ly[i] = std::log(y[i] - offset);
  }
  return fit_line(lx, ly);
}

}  // namespace

FitResult fit_power_law(std::span<const double> n, std::span<const double> y, bool with_offset) {
  if (n.size() != y.size()) throw std::invalid_argument("fit inputs differ in length");
  const std::size_t need = with_offset ? 4 : 3;
  if (n.size() < need) throw std::invalid_argument("too few points for the requested fit");
  for (double v : n)
    if (!(v > 0.0)) throw std::invalid_argument("N must be positive");
  const auto [nmin, nmax] = std::minmax_element(n.begin(), n.end());
  if (*nmin == *nmax) throw std::invalid_argument("degenerate fit: all N are equal");

  FitResult out;
  if (!with_offset) {
    for (double v : y)
      if (!(v > 0.0)) throw std::invalid_argument("pure power fit needs y > 0");
    const LineFit f = log_fit(n, y, 0.0);
    out.a = std::exp(f.intercept);
    out.b = f.slope;
    out.residual = f.rms;
    out.kind = FitKind::pure_power;
    return out;
  }

  const auto [ylo_it, yhi_it] = std::minmax_element(y.begin(), y.end());
  const double ylo = *ylo_it;
  const double span = std::max({*yhi_it - ylo, std::abs(ylo), 1e-300});
  // y-space residual: the log-space one also vanishes as c -> -inf
  auto y_rms = [&](double c) {
    const LineFit f = log_fit(n, y, c);
    const double a = std::exp(f.intercept);
    double ss = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) ss += std::pow(y[i] - (a * std::pow(n[i], f.slope) + c), 2);
    return std::sqrt(ss / static_cast<double>(n.size()));
  };
  // c = ylo - span * 10^u; the cost is multimodal in u, so scan first
  auto cost = [&](double u) { return y_rms(ylo - span * std::pow(10.0, u)); };
  constexpr int kScan = 241;
  constexpr double kUMin = -8.0, kUMax = 4.0;
  const double du = (kUMax - kUMin) / (kScan - 1);
  int best = 0;
  double best_cost = INFINITY;
  for (int k = 0; k < kScan; ++k) {
    const double v = cost(kUMin + k * du);
    if (v < best_cost) {
      best_cost = v;
      best = k;
    }
  }
  double lo = kUMin + std::max(best - 1, 0) * du;
  double hi = kUMin + std::min(best + 1, kScan - 1) * du;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = cost(x1), f2 = cost(x2);
  for (int it = 0; it < 200 && (hi - lo) > 1e-12; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = cost(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = cost(x2);
    }
  }
  const double c = ylo - span * std::pow(10.0, 0.5 * (lo + hi));
  const LineFit f = log_fit(n, y, c);
  out.a = std::exp(f.intercept);
  out.b = f.slope;
  out.c = c;
  out.residual = y_rms(c);
  out.kind = FitKind::power_plus_offset;
  return out;
}

std::vector<UniversalityRow> universality_scan(std::span<const double> g_values, std::span<const int> n_values,
                                               const GridPolicy& grid, unsigned jobs) {
  SweepSpec spec;
  spec.g_values.assign(g_values.begin(), g_values.end());
  spec.n_values.assign(n_values.begin(), n_values.end());
  spec.grid = grid;
  spec.jobs = jobs;
  const auto points = sweep(spec);

  std::vector<UniversalityRow> rows;
  rows.reserve(points.size());
  for (const auto& p : points) {
    UniversalityRow r;
    r.g = p.g;
    r.n_tls = p.n_tls;
    r.big_g = p.g * p.n_tls;
    r.status = p.status;
    if (p.summary) r.e_max_norm = p.summary->e_max / (p.n_tls * grid.omega_z);
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const UniversalityRow& a, const UniversalityRow& b) {
    return std::tie(a.big_g, a.g, a.n_tls) < std::tie(b.big_g, b.g, b.n_tls);
  });
  return rows;
}

namespace {

bool same_g(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

template <class F>
void for_each_g_run(const std::vector<UniversalityRow>& rows, F&& f) {
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i + 1;
    while (j < rows.size() && same_g(rows[j].big_g, rows[i].big_g)) ++j;
    f(i, j);
    i = j;
  }
}

}  // namespace

std::vector<CollapseGroup> collapse_groups(const std::vector<UniversalityRow>& rows, int n_min) {
  std::vector<CollapseGroup> out;
  for_each_g_run(rows, [&](std::size_t i, std::size_t j) {
    CollapseGroup grp;
    grp.big_g = rows[i].big_g;
    for (std::size_t k = i; k < j; ++k)
      if (rows[k].ok() && rows[k].n_tls >= n_min) grp.members.push_back(&rows[k]);
    if (grp.members.size() < 2) return;
    double lo = grp.members.front()->e_max_norm, hi = lo;
    for (const auto* m : grp.members) {
      lo = std::min(lo, m->e_max_norm);
      hi = std::max(hi, m->e_max_norm);
    }
    grp.spread = lo > 0.0 ? (hi - lo) / lo : (hi > 0.0 ? INFINITY : 0.0);
    out.push_back(std::move(grp));
  });
  return out;
}

std::vector<CurvePoint> collapsed_curve(const std::vector<UniversalityRow>& rows) {
  std::vector<CurvePoint> curve;
  for_each_g_run(rows, [&](std::size_t i, std::size_t j) {
    const UniversalityRow* best = nullptr;
    for (std::size_t k = i; k < j; ++k)
      if (rows[k].ok() && (!best || rows[k].n_tls > best->n_tls)) best = &rows[k];
    if (best) curve.push_back({best->big_g, best->e_max_norm});
  });
  return curve;
}

double detect_crossover(const std::vector<CurvePoint>& curve) {
  if (curve.size() < 3) throw std::invalid_argument("crossover detection needs at least 3 curve points");
  double best_g = curve[1].big_g, best = -INFINITY;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double h1 = curve[i].big_g - curve[i - 1].big_g;
    const double h2 = curve[i + 1].big_g - curve[i].big_g;
    const double d2 = 2.0 * ((curve[i + 1].value - curve[i].value) / h2 - (curve[i].value - curve[i - 1].value) / h1) /
                      (h1 + h2);
    if (d2 > best) {
      best = d2;
      best_g = curve[i].big_g;
    }
  }
  return best_g;
}

}  // namespace qbat
