// Acceptance gate. One PASS/FAIL line per criterion; indented lines are
// diagnostics. Usage: qbat_acceptance [criterion 1-9]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qbat/classical.hpp"
#include "qbat/dicke.hpp"
#include "qbat/dynamics.hpp"
#include "qbat/io.hpp"
#include "qbat/metrics.hpp"
#include "qbat/perturbation.hpp"
#include "qbat/scaling.hpp"

using namespace qbat;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string& what) { notes.push_back("info " + what); }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Trajectory charge(int n, double g, double horizon, std::size_t samples, double tau_c = INFINITY,
                  bool keep_states = false) {
  ProtocolConfig c;
  c.g = g;
  c.tau_c = tau_c;
  c.times = uniform_grid(horizon, samples);
  RunOptions o;
  o.keep_states = keep_states;
  return run_protocol(c, SpinSector(n), o);
}

const std::vector<int> kWeakN{5, 10, 20, 30};
constexpr double kWeakG = 1e-3;

Outcome weak_curve() {
  Outcome out;
  for (int n : kWeakN) {
    const auto traj = charge(n, kWeakG, kPi, 4001);
    const auto e = stored_energy(traj.sz, 1.0, n);
    double peak = 0.0, err = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double ref = e_weak(traj.times[i], kWeakG, 1.0, n);
      peak = std::max(peak, ref);
      err = std::max(err, std::abs(e[i] - ref));
    }
    const double curve = err / peak;
    const auto pk = find_first_maximum(e, traj.times);
    const double emax_ref = kWeakG * kWeakG * (n * n - n) / 4.0;
    const double emax_err = pk.found() ? std::abs(pk.first->value - emax_ref) / emax_ref : INFINITY;
    out.check(curve <= 0.01, "N=" + std::to_string(n) + " curve max|E-E_weak|/peak = " + fmt(curve));
    out.check(emax_err <= 0.01, "N=" + std::to_string(n) + " E_max rel. error = " + fmt(emax_err));
  }
  out.info("the closed form is second order in g; the first-order level shift g(N-2)/2 grows with N");
  return out;
}

Outcome weak_timing() {
  Outcome out;
  const double xs = weak_power_phase();
  for (int n : kWeakN) {
    ProtocolConfig c;
    c.g = kWeakG;
    c.times = uniform_grid(kPi, 4001);
    const auto s = summarize(run_protocol(c, SpinSector(n)), c);
    const double de = std::abs(s.t_e - kPi / 2), dp = std::abs(s.t_p - xs);
    out.check(de <= 1e-3, "N=" + std::to_string(n) + " |t_E - pi/2| = " + fmt(de));
    out.check(dp <= 1e-3, "N=" + std::to_string(n) + " |t_P - x*| = " + fmt(dp) + " (x* = " + fmt(xs, 8) + ")");
  }
  return out;
}

Outcome two_tls() {
  Outcome out;
  ProtocolConfig c;
  c.g = 1.0;
  c.times = uniform_grid(3.0, 30001);
  const auto s = summarize(run_protocol(c, SpinSector(2)), c);
  const double t_ref = kPi / (2.0 * std::sqrt(1.25));
  out.check(std::abs(s.e_max - 0.4) <= 1e-6, "E_max = " + fmt(s.e_max, 12) + " (0.4)");
  out.check(std::abs(s.t_e - t_ref) <= 1e-6, "t_E = " + fmt(s.t_e, 12) + " (" + fmt(t_ref, 12) + ")");
  return out;
}

std::vector<double> column(const std::vector<SweepPoint>& pts, double ChargingSummary::*field) {
  std::vector<double> v;
  for (const auto& p : pts) v.push_back(p.ok() ? (*p.summary).*field : NAN);
  return v;
}

Outcome exponents() {
  Outcome out;
  SweepSpec spec;
  for (int n = 10; n <= 60; n += 5) spec.n_values.push_back(n);
  spec.jobs = 1;
  std::vector<double> nd(spec.n_values.begin(), spec.n_values.end());

  spec.g_values = {1.0};
  const auto strong = sweep(spec);
  for (const auto& p : strong)
    if (!p.ok()) out.check(false, "g=1 N=" + std::to_string(p.n_tls) + ": " + p.status);
  if (!out.pass) return out;
  const auto be = fit_power_law(nd, column(strong, &ChargingSummary::e_max), false).b;
  const auto bp = fit_power_law(nd, column(strong, &ChargingSummary::p_max), false).b;
  const auto te = column(strong, &ChargingSummary::t_e), tp = column(strong, &ChargingSummary::t_p);
  const auto bte = fit_power_law(nd, te, true).b, btp = fit_power_law(nd, tp, true).b;
  out.check(std::abs(be - 1.0) <= 0.15, "g=1 b(E_max) = " + fmt(be));
  out.check(std::abs(bp - 1.5) <= 0.15, "g=1 b(P_max) = " + fmt(bp));
  out.check(std::abs(bte + 0.5) <= 0.15, "g=1 b(t_E) = " + fmt(bte) + " (a N^b + c)");
  out.check(std::abs(btp + 0.5) <= 0.15, "g=1 b(t_P) = " + fmt(btp) + " (a N^b + c)");
  out.info("g=1 pure-power b(t_E) = " + fmt(fit_power_law(nd, te, false).b) +
           ", b(t_P) = " + fmt(fit_power_law(nd, tp, false).b));

  spec.g_values = {kWeakG};
  const auto weak = sweep(spec);
  for (const auto& p : weak)
    if (!p.ok()) out.check(false, "g=1e-3 N=" + std::to_string(p.n_tls) + ": " + p.status);
  if (!out.pass) return out;
  const auto we = fit_power_law(nd, column(weak, &ChargingSummary::e_max), false).b;
  const auto wp = fit_power_law(nd, column(weak, &ChargingSummary::p_max), false).b;
  out.check(std::abs(we - 2.0) <= 0.1, "g=1e-3 b(E_max) = " + fmt(we));
  out.check(std::abs(wp - 2.0) <= 0.1, "g=1e-3 b(P_max) = " + fmt(wp));
  for (auto [name, field] : {std::pair{"t_E", &ChargingSummary::t_e}, std::pair{"t_P", &ChargingSummary::t_p}}) {
    const auto t = column(weak, field);
    double mean = 0.0;
    for (double v : t) mean += v / t.size();
    double dev = 0.0;
    for (double v : t) dev = std::max(dev, std::abs(v - mean) / mean);
    out.check(dev <= 0.02, std::string("g=1e-3 ") + name + " max|t-mean|/mean = " + fmt(dev) + " (mean " +
                               fmt(mean, 6) + ")");
  }
  return out;
}

Outcome universality() {
  Outcome out;
  const std::vector<double> g{0.01, 0.02, 0.05, 0.1};
  std::vector<int> n;
  for (int v = 5; v <= 100; v += 5) n.push_back(v);
  const auto rows = universality_scan(g, n, {}, 1);
  for (const auto& r : rows)
    if (!r.ok()) out.check(false, "g=" + fmt(r.g) + " N=" + std::to_string(r.n_tls) + ": " + r.status);

  const auto groups = collapse_groups(rows, 20);
  double worst = 0.0, worst_g = 0.0;
  int failing = 0;
  std::ostringstream bad;
  for (const auto& gr : groups) {
    if (gr.spread > worst) {
      worst = gr.spread;
      worst_g = gr.big_g;
    }
    if (gr.spread > 0.05) {
      ++failing;
      bad << " G=" << fmt(gr.big_g, 3) << ":" << fmt(gr.spread, 2);
    }
  }
  out.check(failing == 0, "collapse at N>=20: " + std::to_string(groups.size()) + " matched-G groups, worst spread " +
                              fmt(worst) + " at G=" + fmt(worst_g, 3));
  if (failing) out.info(std::to_string(failing) + " groups above 5%:" + bad.str());

  const auto curve = collapsed_curve(rows);
  const double gc = detect_crossover(curve);
  out.check(std::abs(gc - 1.0) <= 0.2, "crossover G_c = " + fmt(gc));

  double lowest = INFINITY;
  int strong = 0;
  for (const auto& r : rows)
    if (r.ok() && r.big_g >= 10.0 - 1e-9) {
      ++strong;
      lowest = std::min(lowest, r.e_max_norm);
    }
  out.check(strong > 0 && lowest > 0.60,
            "E_max/(N w_z) over " + std::to_string(strong) + " points with G>=10: min " + fmt(lowest));
  GridPolicy gp;
  const auto big = charging_point(400, 0.1, gp);
  out.info("beyond the grid: g=0.1, N=400 (G=40) gives E_max/(N w_z) = " + fmt(big.e_max / 400));
  return out;
}

Outcome ergotropy() {
  Outcome out;
  double d_total = 0.0, d_single = 0.0, excess = -INFINITY;
  std::size_t samples = 0;
  for (int n : {2, 5, 12, 31})
    for (double g : {0.3, 1.0, 2.5}) {
      const auto traj = charge(n, g, 8.0, 240, INFINITY, true);
      const auto m = compute_metrics(traj);
      for (std::size_t i = 0; i < traj.size(); ++i, ++samples) {
        d_total = std::max(d_total, std::abs(m.ergotropy_total[i] - m.e_b[i]));
        d_single = std::max(d_single, std::abs(m.ergotropy_single[i] - std::max(0.0, 2.0 * traj.sz[i] / n)));
        excess = std::max(excess, n * m.ergotropy_single[i] - m.ergotropy_total[i]);
      }
    }
  out.info(std::to_string(samples) + " samples, N in {2,5,12,31}, g in {0.3,1,2.5}");
  out.check(d_total <= 1e-9, "max|E_total - E_B| = " + fmt(d_total));
  out.check(d_single <= 1e-9, "max|E_1 - max(0, 2<S_z>/N)| = " + fmt(d_single));
  out.check(excess <= 1e-12, "max(N E_1 - E_total) = " + fmt(excess));
  return out;
}

MappingReport mapping(CouplingKind kind, int photons, double omega_c, double g_mapped) {
  DickeConfig c;
  c.n_tls = 2;
  c.omega_c = omega_c;
  c.kind = kind;
  c.initial_photons = photons;
  c.n_max = photons + 20;
  const double boson = kind == CouplingKind::two_photon ? 2.0 * photons + 1.0 : 1.0;
  c.lambda = std::sqrt(g_mapped * omega_c / (4.0 * boson));
  return validate_mapping(c, 4.0 * kPi, 4001);
}

Outcome dispersive() {
  Outcome out;
  const std::vector<double> ladder{10.0, 20.0, 40.0};
  for (auto [label, kind, photons, g] :
       {std::tuple{"single-photon", CouplingKind::single_photon, 0, 0.018},
        std::tuple{"two-photon n=2", CouplingKind::two_photon, 2, 0.018 * 5}}) {
    std::vector<MappingReport> r;
    for (double wc : ladder) r.push_back(mapping(kind, photons, wc, g));
    const auto& mid = r[1];
    std::string name(label);
    out.check(mid.valid() && mid.maxima_found, name + " w_c=20: truncation ok, leakage " + fmt(mid.leakage, 2));
    out.check(mid.e_max_dev <= 0.10, name + " w_c=20 (g=" + fmt(mid.g_mapped) + "): E_max deviation " +
                                         fmt(mid.e_max_dev) + ", curve dev_max " + fmt(mid.dev_max));
    std::string dev, edev;
    bool dec = true;
    for (std::size_t i = 0; i < r.size(); ++i) {
      dev += (i ? " > " : "") + fmt(r[i].dev_max, 3);
      edev += (i ? " > " : "") + fmt(r[i].e_max_dev, 3);
      if (i && !(r[i].dev_max < r[i - 1].dev_max && r[i].e_max_dev < r[i - 1].e_max_dev)) dec = false;
    }
    out.check(dec, name + " w_c=10,20,40: dev_max " + dev + "; E_max dev " + edev);
    out.info(name + " bare-frame dev_max at w_c=20: " + fmt(mid.bare_dev_max));
  }
  return out;
}

Outcome conservation() {
  Outcome out;
  const double g = 1.0, tau = 1.3;
  for (int n : {2, 5, 31}) {
    ProtocolConfig c;
    c.g = g;
    c.tau_c = tau;
    c.times = uniform_grid(10.0, 1001);
    RunOptions o;
    o.keep_states = true;
    const SpinSector s(n);
    const auto full = run_protocol(c, s, o);
    const auto block = run_protocol_parity(c, parity_split(s).first, o);
    const auto h = build_hamiltonian(s, 1.0, g);
    const double e0 = expectation(h, full.states[0].amplitudes());

    double norm = 0, energy = 0, parity = 0, equiv = 0, hold = 0;
    double held = NAN;
    for (std::size_t i = 0; i < full.size(); ++i) {
      const auto& psi = full.states[i].amplitudes();
      norm = std::max(norm, std::abs(psi.norm() - 1.0));
      if (full.times[i] <= tau) energy = std::max(energy, std::abs(expectation(h, psi) - e0) / std::abs(e0));
      parity = std::max({parity, std::abs(full.sx[i]), std::abs(full.sy[i])});
      equiv = std::max({equiv, std::abs(full.sz[i] - block.sz[i]),
                        (psi - block.states[i].amplitudes()).cwiseAbs().maxCoeff()});
      if (full.times[i] >= tau) {
        if (std::isnan(held)) held = full.sz[i];
        hold = std::max(hold, std::abs(full.sz[i] - held));
      }
    }
    const std::string p = "N=" + std::to_string(n) + " ";
    out.check(norm <= 1e-12, p + "norm drift " + fmt(norm, 2));
    out.check(energy <= 1e-10, p + "charging energy drift (rel) " + fmt(energy, 2));
    out.check(parity <= 1e-10, p + "max|<S_x>|,|<S_y>| " + fmt(parity, 2));
    out.check(equiv <= 1e-10, p + "parity block vs full space " + fmt(equiv, 2));
    out.check(hold <= 1e-12, p + "<S_z> drift after tau_c " + fmt(hold, 2));
  }
  return out;
}

Outcome classical() {
  Outcome out;
  double worst = 0.0;
  const std::vector<std::pair<double, int>> same_g{{0.25, 8}, {0.5, 4}, {1.0, 2}, {2.0, 1}, {0.0625, 32}};
  for (double q : {-0.99, -0.4, 0.3, 0.95})
    for (double p : {-1.0, 0.2, 2.5})
      for (double t : {0.0, 0.7, 5.3}) {
        const auto ref = classical_rhs({q, p}, t, same_g[0].first, same_g[0].second, 1.0);
        for (auto [g, n] : same_g) {
          const auto d = classical_rhs({q, p}, t, g, n, 1.0);
          worst = std::max({worst, std::abs(d.dq - ref.dq), std::abs(d.dp - ref.dp)});
        }
      }
  out.check(worst == 0.0, "derivatives at fixed G = 2 across (g, N) pairs: max difference " + fmt(worst));

  const ClassicalState s0{-0.9, 0.1};
  const double horizon = 4.0;
  const auto ref = integrate_classical(s0, 0.1, 10, 1.0, horizon, 1e-4);
  auto err = [&](double dt) {
    const auto tr = integrate_classical(s0, 0.1, 10, 1.0, horizon, dt);
    return std::hypot(tr.q_tilde.back() - ref.q_tilde.back(), tr.p_tilde.back() - ref.p_tilde.back());
  };
  const double r1 = err(0.08) / err(0.04), r2 = err(0.04) / err(0.02);
  out.check(r1 >= 14 && r1 <= 18 && r2 >= 14 && r2 <= 18,
            "step-halving endpoint error ratios " + fmt(r1) + ", " + fmt(r2));

  double drift = 0.0;
  for (double big_g : {0.5, 1.0, 20.0}) {
    const auto tr = integrate_classical({-1.0, 0.4}, big_g / 10, 10, 1.0, 20.0, 1e-3);
    for (double q : tr.q_tilde) drift = std::max(drift, std::abs(q + 1.0));
  }
  out.check(drift <= std::numeric_limits<double>::epsilon(), "south-pole drift " + fmt(drift));
  return out;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "weak-coupling curve and E_max agreement", weak_curve},
      {2, "weak-coupling t_E and t_P", weak_timing},
      {3, "two-TLS closed form", two_tls},
      {4, "scaling exponents", exponents},
      {5, "universality collapse", universality},
      {6, "ergotropy consistency", ergotropy},
      {7, "dispersive mapping", dispersive},
      {8, "conservation suite", conservation},
      {9, "classical limit", classical},
  };
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 9) {
      std::fprintf(stderr, "usage: %s [criterion 1-9]\n", argv[0]);
      return 2;
    }
  }

  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s  criterion %d: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs);
    for (const auto& note : o.notes) std::printf("        %s\n", note.c_str());
  }
  if (!only) std::printf("EXCLUDED  criterion 10: fit amplitudes and thermodynamic-limit claims\n");
  std::fflush(stdout);
  return failed ? 1 : 0;
}
