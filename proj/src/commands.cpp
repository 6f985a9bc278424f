#include "qbat/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qbat/classical.hpp"
#include "qbat/dicke.hpp"
#include "qbat/dynamics.hpp"
#include "qbat/errors.hpp"
#include "qbat/io.hpp"
#include "qbat/metrics.hpp"
#include "qbat/perturbation.hpp"
#include "qbat/scaling.hpp"

namespace qbat {

std::string version_string() { return QBAT_VERSION; }

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr double kOmegaZ = 1.0;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

fs::path output_dir() {
  const char* env = std::getenv("QBAT_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

std::string extension(Format f) { return f == Format::csv ? ".csv" : ".json"; }

double parse_real(const std::string& text, const std::string& flag) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "inf" || t == "infinity" || t == "never") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(flag + ": not a number: '" + text + "'");
  }
}

/// "a:b:step", both ends included.
std::vector<int> parse_n_range(const std::string& text) {
  std::vector<int> parts;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw UsageError("--n-range: expected a:b[:step], got '" + text + "'");
    }
  }
  if (parts.size() == 2) parts.push_back(1);
  if (parts.size() != 3 || parts[2] <= 0 || parts[0] < 1 || parts[1] < parts[0])
    throw UsageError("--n-range: expected 1 <= a <= b and step > 0, got '" + text + "'");
  std::vector<int> out;
  for (int n = parts[0]; n <= parts[1]; n += parts[2]) out.push_back(n);
  return out;
}

std::vector<int> resolve_n_values(const std::string& range, const std::vector<int>& list) {
  if (!range.empty() && !list.empty()) throw UsageError("give either --n-range or --n-list");
  std::vector<int> n = range.empty() ? list : parse_n_range(range);
  if (n.empty()) throw UsageError("no N values: use --n-range a:b:step or --n-list");
  std::sort(n.begin(), n.end());
  n.erase(std::unique(n.begin(), n.end()), n.end());
  return n;
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Writes the table, the optional plot script and the manifest; returns the output path.
struct Emitter {
  std::string command;
  std::vector<std::string> args;
  std::string output;
  std::string format = "csv";
  bool gnuplot = false;

  fs::path path() const {
    if (!output.empty()) return output;
    return output_dir() / (command + extension(parse_format(format)));
  }

  void emit(const Table& table, const ojson& parameters, const ojson& summary, std::size_t x_col,
            const std::vector<std::size_t>& y_cols, std::vector<std::string> extra_outputs, std::ostream& out) const {
    const Format f = parse_format(format);
    const fs::path p = path();
    write_table(p, table, f);
    std::vector<std::string> outputs{p.string()};
    if (gnuplot && f == Format::csv) {
      fs::path script = p;
      script.replace_extension(".gp");
      write_gnuplot(script, p, table, x_col, y_cols);
      outputs.push_back(script.string());
    }
    for (auto& e : extra_outputs) outputs.push_back(std::move(e));

    RunManifest m;
    m.command = command;
    m.args = args;
    if (output.empty()) {
      m.args.push_back("--output");
      m.args.push_back(p.string());
    }
    m.parameters = parameters;
    m.summary = summary;
    m.version = version_string();
    m.timestamp = utc_timestamp();
    m.outputs = outputs;
    write_manifest(manifest_path(p), m);
    out << "wrote " << p.string() << " (" << table.rows.size() << " rows)\n";
  }
};

void add_output_flags(CLI::App* sub, Emitter& em) {
  sub->add_option("--output,-o", em.output, "Output file (default: $QBAT_OUTPUT_DIR/<command>.<format>)");
  sub->add_option("--format", em.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--gnuplot", em.gnuplot, "Also write a gnuplot script next to the CSV");
}

// evolve

struct EvolveArgs {
  int n_tls = 0;
  double g = 0.0;
  std::optional<double> horizon;
  std::size_t samples = 2000;
  std::string tau_c = "inf";
  bool with_states = false;
  bool with_perturbative = false;
};

int cmd_evolve(const EvolveArgs& a, const Emitter& em, std::ostream& out) {
  if (a.samples < 2) throw UsageError("--samples must be at least 2");
  ProtocolConfig cfg;
  cfg.omega_z = kOmegaZ;
  cfg.g = a.g;
  cfg.tau_c = parse_real(a.tau_c, "--tau-c");
  const double horizon = a.horizon.value_or(default_horizon(a.n_tls, a.g, kOmegaZ));
  if (!(horizon > 0.0)) throw UsageError("--horizon must be positive");
  cfg.times = uniform_grid(horizon, a.samples);
  cfg.validate();

  const SpinSector sector(a.n_tls);
  RunOptions opts;
  opts.keep_states = a.with_states;
  const Trajectory traj = run_protocol(cfg, sector, opts);
  const MetricSeries ms = compute_metrics(traj);
  const double n = a.n_tls;

  Table t;
  t.columns = {"t", "e_b_norm", "power_norm", "ergotropy_single", "magnetization"};
  if (a.with_states) t.columns.push_back("ergotropy_total_norm");
  if (a.with_perturbative) {
    t.columns.push_back("e_b_pert_norm");
    t.columns.push_back("power_pert_norm");
  }
  for (std::size_t i = 0; i < ms.times.size(); ++i) {
    const double ti = ms.times[i];
    std::vector<Cell> row{ti, ms.e_b[i] / (n * kOmegaZ), ms.power[i] / (n * kOmegaZ * kOmegaZ),
                          ms.ergotropy_single[i] / kOmegaZ, ms.magnetization[i]};
    if (a.with_states) row.emplace_back(ms.ergotropy_total[i] / (n * kOmegaZ));
    if (a.with_perturbative) {
      row.emplace_back(e_weak(ti, a.g, kOmegaZ, a.n_tls) / (n * kOmegaZ));
      row.emplace_back(p_weak(ti, a.g, kOmegaZ, a.n_tls) / (n * kOmegaZ * kOmegaZ));
    }
    t.add_row(std::move(row));
  }

  std::vector<std::string> extra;
  if (a.with_states) {
    fs::path sp = em.path();
    sp.replace_extension(".states.csv");
    Table st;
    st.columns = {"t", "index", "two_m", "re", "im"};
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const auto& amps = traj.states[k].amplitudes();
      for (std::size_t i = 0; i < sector.dim(); ++i) {
        const cplx c = amps[static_cast<Eigen::Index>(i)];
        st.add_row({traj.times[k], static_cast<std::int64_t>(i), static_cast<std::int64_t>(sector.twice_m(i)),
                    c.real(), c.imag()});
      }
    }
    write_table(sp, st, Format::csv);
    extra.push_back(sp.string());
  }

  ojson params{{"n_tls", a.n_tls}, {"g", a.g}, {"omega_z", kOmegaZ}, {"horizon", horizon},
               {"samples", a.samples}, {"tau_c", a.tau_c}, {"with_states", a.with_states},
               {"with_perturbative", a.with_perturbative}};
  ojson summary = nullptr;
  const PeakSearch pe = find_first_maximum(ms.e_b, ms.times);
  if (pe.found()) summary = ojson{{"e_max", pe.first->value}, {"t_e", pe.first->time}};
  em.emit(t, params, summary, 1, {2, 3}, std::move(extra), out);
  return kExitOk;
}

// sweep / universality

struct ScanArgs {
  std::vector<double> g_values;
  std::string n_range;
  std::vector<int> n_list;
  std::size_t samples = 2000;
  double periods = 10.0;
  std::optional<double> horizon;
  unsigned jobs = default_jobs();
  int collapse_n_min = 20;
};

GridPolicy grid_from(const ScanArgs& a) {
  GridPolicy gp;
  gp.omega_z = kOmegaZ;
  gp.samples = a.samples;
  gp.periods = a.periods;
  gp.horizon = a.horizon;
  return gp;
}

ojson scan_params(const ScanArgs& a, const std::vector<int>& n) {
  ojson p{{"g_values", a.g_values}, {"n_values", n}, {"omega_z", kOmegaZ}, {"samples", a.samples},
          {"periods", a.periods}};
  p["horizon"] = a.horizon ? ojson(*a.horizon) : ojson(nullptr);
  return p;
}

int cmd_sweep(const ScanArgs& a, const Emitter& em, std::ostream& out) {
  SweepSpec spec;
  spec.g_values = a.g_values;
  spec.n_values = resolve_n_values(a.n_range, a.n_list);
  spec.grid = grid_from(a);
  spec.jobs = a.jobs;
  spec.validate();
  const auto points = sweep(spec);

  Table t;
  t.columns = {"n_tls", "g", "e_max", "t_e", "p_max", "t_p", "e_max_per_tls", "p_max_per_tls", "status"};
  const double nan = std::nan("");
  int failures = 0;
  for (const auto& p : points) {
    const double n = p.n_tls;
    if (p.ok()) {
      const auto& s = *p.summary;
      t.add_row({static_cast<std::int64_t>(p.n_tls), p.g, s.e_max, s.t_e, s.p_max, s.t_p, s.e_max / n, s.p_max / n,
                 p.status});
    } else {
      ++failures;
      t.add_row({static_cast<std::int64_t>(p.n_tls), p.g, nan, nan, nan, nan, nan, nan, p.status});
    }
  }
  em.emit(t, scan_params(a, spec.n_values), ojson{{"points", points.size()}, {"failures", failures}}, 1, {3},
          {}, out);
  if (failures) out << failures << " point(s) failed\n";
  return failures ? kExitPointFailure : kExitOk;
}

int cmd_universality(const ScanArgs& a, const Emitter& em, std::ostream& out) {
  const auto n = resolve_n_values(a.n_range, a.n_list);
  if (a.g_values.empty()) throw UsageError("no coupling values: use --g-list");
  const auto rows = universality_scan(a.g_values, n, grid_from(a), a.jobs);

  Table t;
  t.columns = {"g", "n_tls", "G", "e_max_norm", "status"};
  int failures = 0;
  for (const auto& r : rows) {
    if (!r.ok()) ++failures;
    t.add_row({r.g, static_cast<std::int64_t>(r.n_tls), r.big_g, r.ok() ? r.e_max_norm : std::nan(""), r.status});
  }

  ojson summary{{"points", rows.size()}, {"failures", failures}};
  const auto groups = collapse_groups(rows, a.collapse_n_min);
  double worst = 0.0;
  for (const auto& gr : groups) worst = std::max(worst, gr.spread);
  summary["collapse_n_min"] = a.collapse_n_min;
  summary["collapse_groups"] = groups.size();
  summary["collapse_max_spread"] = worst;
  const auto curve = collapsed_curve(rows);
  if (curve.size() >= 3) {
    const double gc = detect_crossover(curve);
    summary["crossover_G"] = gc;
    out << "crossover G = " << format_double(gc) << "\n";
  }
  out << "collapse: " << groups.size() << " matched-G groups, max spread " << format_double(worst) << "\n";
  em.emit(t, scan_params(a, n), summary, 3, {4}, {}, out);
  return failures ? kExitPointFailure : kExitOk;
}

// validate-dispersive

struct DispersiveArgs {
  int n_tls = 2;
  std::vector<double> omega_c{20.0};
  std::vector<double> lambda;
  std::optional<double> fixed_g;
  std::string coupling = "single";
  int photons = 0;
  std::optional<int> n_max;
  double horizon = 4.0 * std::numbers::pi;
  std::size_t samples = 4001;
  unsigned jobs = default_jobs();
};

int cmd_validate(const DispersiveArgs& a, const Emitter& em, std::ostream& out) {
  if (a.lambda.empty() == !a.fixed_g.has_value())
    throw UsageError("give exactly one of --lambda or --fixed-g");
  if (a.lambda.size() > 1 && a.lambda.size() != a.omega_c.size())
    throw UsageError("--lambda takes one value or one per --omega-c");

  const CouplingKind kind = a.coupling == "two" ? CouplingKind::two_photon : CouplingKind::single_photon;
  std::vector<DickeConfig> configs;
  for (std::size_t i = 0; i < a.omega_c.size(); ++i) {
    DickeConfig c;
    c.n_tls = a.n_tls;
    c.omega_z = kOmegaZ;
    c.omega_c = a.omega_c[i];
    c.kind = kind;
    c.initial_photons = a.photons;
    c.n_max = a.n_max.value_or(a.photons + 20);
    if (a.fixed_g) {
      const double boson = kind == CouplingKind::two_photon ? 2.0 * a.photons + 1.0 : 1.0;
      c.lambda = std::sqrt(*a.fixed_g * c.omega_c / (4.0 * boson));
    } else {
      c.lambda = a.lambda.size() == 1 ? a.lambda[0] : a.lambda[i];
    }
    c.validate();
    configs.push_back(c);
  }

  std::vector<MappingReport> reports(configs.size());
  std::vector<std::string> errors(configs.size());
  parallel_for(configs.size(), a.jobs, [&](std::size_t i) {
    try {
      reports[i] = validate_mapping(configs[i], a.horizon, a.samples);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  Table t;
  t.columns = {"omega_c",   "lambda",    "g_mapped",  "dev_rms",         "dev_max",     "truncation_ok",
               "e_max_dev", "t_e_dev",   "dispersive_ratio", "regime_ok", "bare_dev_max", "leakage", "status"};
  const double nan = std::nan("");
  int failures = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    if (!errors[i].empty()) {
      ++failures;
      t.add_row({c.omega_c, c.lambda, nan, nan, nan, false, nan, nan, nan, false, nan, nan, "error: " + errors[i]});
      continue;
    }
    const auto& r = reports[i];
    std::string status = "ok";
    if (!r.truncation_ok) status = "truncation-leak";
    else if (!r.maxima_found) status = "no-maximum";
    if (status != "ok") ++failures;
    t.add_row({c.omega_c, c.lambda, r.g_mapped, r.dev_rms, r.dev_max, r.truncation_ok, r.e_max_dev, r.t_e_dev,
               r.dispersive_ratio, r.regime_ok, r.bare_dev_max, r.leakage, status});
    if (!r.regime_ok)
      out << "warning: lambda/|omega_c - omega_z| = " << format_double(r.dispersive_ratio)
          << " is outside the dispersive regime\n";
  }

  ojson params{{"n_tls", a.n_tls}, {"omega_c", a.omega_c}, {"coupling", a.coupling}, {"photons", a.photons},
               {"horizon", a.horizon}, {"samples", a.samples}};
  params["lambda"] = a.lambda.empty() ? ojson(nullptr) : ojson(a.lambda);
  params["fixed_g"] = a.fixed_g ? ojson(*a.fixed_g) : ojson(nullptr);
  params["n_max"] = configs.empty() ? ojson(nullptr) : ojson(configs.front().n_max);
  em.emit(t, params, ojson{{"failures", failures}}, 1, {5}, {}, out);
  return failures ? kExitPointFailure : kExitOk;
}

// classical

struct ClassicalArgs {
  int n_tls = 0;
  double g = 0.0;
  double q0 = -1.0 + 1e-3;
  double p0 = 0.0;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::size_t stride = 10;
};

int cmd_classical(const ClassicalArgs& a, const Emitter& em, std::ostream& out) {
  if (a.g < 0.0) throw NegativeCouplingError(a.g);
  if (a.n_tls < 1) throw UsageError("--n-tls must be at least 1");
  if (a.stride < 1) throw UsageError("--stride must be at least 1");
  const double horizon = a.horizon.value_or(default_horizon(a.n_tls, a.g, kOmegaZ));
  const double dt = a.dt.value_or(default_classical_step(a.g, a.n_tls, kOmegaZ));
  const auto tr = integrate_classical({a.q0, a.p0}, a.g, a.n_tls, kOmegaZ, horizon, dt);

  Table t;
  t.columns = {"t", "q_tilde", "p_tilde", "h_cl"};
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (i % a.stride == 0 || i + 1 == tr.size()) t.add_row({tr.t[i], tr.q_tilde[i], tr.p_tilde[i], tr.h_cl[i]});

  ojson params{{"n_tls", a.n_tls}, {"g", a.g},   {"G", a.g * a.n_tls}, {"q0", a.q0},
               {"p0", a.p0},       {"horizon", horizon}, {"dt", dt},   {"stride", a.stride}};
  em.emit(t, params, nullptr, 1, {2, 3}, {}, out);
  return kExitOk;
}

// fit

struct FitArgs {
  std::string input;
  std::string column = "e_max";
  std::string x_column = "n_tls";
  bool with_offset = false;
  std::optional<double> g;
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::string output;
};

int cmd_fit(const FitArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const fs::path in = a.input.empty() ? output_dir() / "sweep.csv" : fs::path(a.input);
  const CsvData data = read_csv(in);
  const auto xs = data.numeric(a.x_column);
  const auto ys = data.numeric(a.column);
  std::optional<std::vector<double>> gs;
  if (a.g) gs = data.numeric("g");

  std::vector<double> x, y;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    if (gs && !(std::abs((*gs)[i] - *a.g) <= 1e-12 * std::max(1.0, std::abs(*a.g)))) continue;
    if (a.n_min && xs[i] < *a.n_min) continue;
    if (a.n_max && xs[i] > *a.n_max) continue;
    x.push_back(xs[i]);
    y.push_back(ys[i]);
  }
  if (!a.g) {
    const auto gcol = std::find(data.columns.begin(), data.columns.end(), "g");
    if (gcol != data.columns.end()) {
      auto gv = data.numeric("g");
      std::sort(gv.begin(), gv.end());
      gv.erase(std::unique(gv.begin(), gv.end()), gv.end());
      if (gv.size() > 1) throw UsageError("input mixes several g values; select one with --g");
    }
  }

  const FitResult r = fit_power_law(x, y, a.with_offset);
  ojson j{{"column", a.column},
          {"x_column", a.x_column},
          {"kind", r.kind == FitKind::pure_power ? "pure_power" : "power_plus_offset"},
          {"a", r.a},
          {"b", r.b}};
  j["c"] = r.c ? ojson(*r.c) : ojson(nullptr);
  j["residual"] = r.residual;
  j["points"] = x.size();
  out << j.dump(2) << "\n";

  if (!a.output.empty()) {
    const fs::path p = a.output;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream(p) << j.dump(2) << "\n";
    RunManifest m;
    m.command = "fit";
    m.args = args;
    m.parameters = ojson{{"input", in.string()}, {"column", a.column}, {"with_offset", a.with_offset}};
    m.summary = j;
    m.version = version_string();
    m.timestamp = utc_timestamp();
    m.outputs = {p.string()};
    write_manifest(manifest_path(p), m);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dicke/LMG quantum battery simulator", "qbat"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Emitter em;
  em.args = args;

  EvolveArgs ev;
  auto* evolve = app.add_subcommand("evolve", "Charging time series for one (N, g)");
  evolve->add_option("--n-tls", ev.n_tls, "Number of two-level systems")->required()->check(CLI::PositiveNumber);
  evolve->add_option("--g", ev.g, "Effective coupling in units of omega_z")->required();
  evolve->add_option("--horizon", ev.horizon, "Final time (default 10 * 2 pi / max(1, gN))");
  evolve->add_option("--samples", ev.samples, "Number of time samples");
  evolve->add_option("--tau-c", ev.tau_c, "Switch-off time of the charger (inf: never)");
  evolve->add_flag("--with-states", ev.with_states, "Write amplitudes and the total ergotropy");
  evolve->add_flag("--with-perturbative", ev.with_perturbative, "Add weak-coupling prediction columns");
  add_output_flags(evolve, em);

  ScanArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Charging maxima over a grid of N and g");
  sweep_cmd->add_option("--g,--g-list", sw.g_values, "Coupling value(s), comma separated")->required()->delimiter(',');
  sweep_cmd->add_option("--n-range", sw.n_range, "a:b:step, inclusive");
  sweep_cmd->add_option("--n-list", sw.n_list, "Explicit N values")->delimiter(',');
  sweep_cmd->add_option("--samples", sw.samples, "Time samples per point");
  sweep_cmd->add_option("--periods", sw.periods, "Horizon in units of 2 pi / max(1, gN)");
  sweep_cmd->add_option("--horizon", sw.horizon, "Fixed horizon for every point");
  sweep_cmd->add_option("--jobs,-j", sw.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_output_flags(sweep_cmd, em);

  ScanArgs un;
  auto* univ = app.add_subcommand("universality", "Normalized E_max against G = gN");
  univ->add_option("--g-list,--g", un.g_values, "Coupling values, comma separated")->required()->delimiter(',');
  univ->add_option("--n-range", un.n_range, "a:b:step, inclusive");
  univ->add_option("--n-list", un.n_list, "Explicit N values")->delimiter(',');
  univ->add_option("--samples", un.samples, "Time samples per point");
  univ->add_option("--periods", un.periods, "Horizon in units of 2 pi / max(1, gN)");
  univ->add_option("--horizon", un.horizon, "Fixed horizon for every point");
  univ->add_option("--collapse-n-min", un.collapse_n_min, "Smallest N used in the collapse check");
  univ->add_option("--jobs,-j", un.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_output_flags(univ, em);

  DispersiveArgs dv;
  auto* disp = app.add_subcommand("validate-dispersive", "Full Dicke model against the mapped LMG model");
  disp->add_option("--n-tls", dv.n_tls, "Number of two-level systems")->check(CLI::PositiveNumber);
  disp->add_option("--omega-c", dv.omega_c, "Cavity frequency (list allowed)")->delimiter(',');
  disp->add_option("--lambda", dv.lambda, "Matter-radiation coupling (one, or one per omega_c)")->delimiter(',');
  disp->add_option("--fixed-g", dv.fixed_g, "Choose lambda per omega_c so that the mapped g is fixed");
  disp->add_option("--coupling", dv.coupling, "single or two (photon)")->check(CLI::IsMember({"single", "two"}));
  disp->add_option("--photons", dv.photons, "Initial Fock state")->check(CLI::NonNegativeNumber);
  disp->add_option("--n-max", dv.n_max, "Fock cutoff (default photons + 20)");
  disp->add_option("--horizon", dv.horizon, "Final time");
  disp->add_option("--samples", dv.samples, "Time samples");
  disp->add_option("--jobs,-j", dv.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_output_flags(disp, em);

  ClassicalArgs cl;
  auto* classical = app.add_subcommand("classical", "Mean-field equations of motion (RK4)");
  classical->add_option("--n-tls", cl.n_tls, "Number of two-level systems")->required();
  classical->add_option("--g", cl.g, "Effective coupling")->required();
  classical->add_option("--q0", cl.q0, "Initial rescaled q");
  classical->add_option("--p0", cl.p0, "Initial rescaled p");
  classical->add_option("--horizon", cl.horizon, "Final time");
  classical->add_option("--dt", cl.dt, "RK4 step (default 1e-3 / max(1, gN))");
  classical->add_option("--stride", cl.stride, "Write every k-th step");
  add_output_flags(classical, em);

  FitArgs ft;
  auto* fit = app.add_subcommand("fit", "Power-law fit of a sweep column against N");
  fit->add_option("--input,-i", ft.input, "CSV table (default: $QBAT_OUTPUT_DIR/sweep.csv)");
  fit->add_option("--column", ft.column, "Column to fit");
  fit->add_option("--x-column", ft.x_column, "Abscissa column");
  fit->add_flag("--with-offset", ft.with_offset, "Fit a N^b + c instead of a N^b");
  fit->add_option("--g", ft.g, "Keep only rows with this g");
  fit->add_option("--n-min", ft.n_min, "Smallest abscissa kept");
  fit->add_option("--n-max", ft.n_max, "Largest abscissa kept");
  fit->add_option("--output,-o", ft.output, "Also write the JSON here");

  std::string manifest;
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay->add_option("--manifest", manifest, "Manifest JSON written by an earlier run")->required();

  std::vector<std::string> argv_store{"qbat"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (evolve->parsed()) {
      em.command = "evolve";
      return cmd_evolve(ev, em, out);
    }
    if (sweep_cmd->parsed()) {
      em.command = "sweep";
      return cmd_sweep(sw, em, out);
    }
    if (univ->parsed()) {
      em.command = "universality";
      return cmd_universality(un, em, out);
    }
    if (disp->parsed()) {
      em.command = "validate-dispersive";
      return cmd_validate(dv, em, out);
    }
    if (classical->parsed()) {
      em.command = "classical";
      return cmd_classical(cl, em, out);
    }
    if (fit->parsed()) return cmd_fit(ft, args, out);
    if (replay->parsed()) {
      const RunManifest m = read_manifest(manifest);
      if (m.args.empty() || m.args.front() == "replay") throw UsageError("manifest holds no replayable command");
      return run_cli(m.args, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace qbat
