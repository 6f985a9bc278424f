#pragma once

// (N, g) sweeps, power-law fits and the G = gN universality table.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbat/metrics.hpp"

namespace qbat {

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Results must be
/// written to per-index slots; scheduling order is not deterministic.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

struct GridPolicy {
  double omega_z = 1.0;
  std::size_t samples = 2000;
  double periods = 10.0;          // horizon = periods * 2 pi / max(w_z, g N)
  std::optional<double> horizon;  // fixed horizon overrides `periods`
};

struct SweepSpec {
  std::vector<double> g_values;
  std::vector<int> n_values;  // ascending
  GridPolicy grid;
  unsigned jobs = 1;

  void validate() const;
};

struct SweepPoint {
  int n_tls = 0;
  double g = 0.0;
  std::optional<ChargingSummary> summary;
  std::string status = "ok";

  bool ok() const { return summary.has_value(); }
};

/// Exact charging summary of one point. The charge is never switched off
/// while searching: maxima lie on the charging segment, so tau_c = t_E (t_P)
/// gives the same numbers. Throws NoMaximumError.
ChargingSummary charging_point(int n_tls, double g, const GridPolicy& grid);

/// One entry per (N, g), sorted by (N, g). Failures are recorded per point.
std::vector<SweepPoint> sweep(const SweepSpec& spec);

enum class FitKind { pure_power, power_plus_offset };

struct FitResult {
  double a = 0.0;
  double b = 0.0;
  std::optional<double> c;
  double residual = 0.0;  // RMS residual: of log y for pure_power, of y itself with an offset
  FitKind kind = FitKind::pure_power;
};

/// y = a N^b (log-log least squares) or y = a N^b + c (golden-section search
/// over c minimizing the y residual after a log-spaced scan, log-log fit of
/// y - c inside). Needs >= 3 points (>= 4 with offset)
/// and at least two distinct N.
FitResult fit_power_law(std::span<const double> n, std::span<const double> y, bool with_offset);

struct UniversalityRow {
  double g = 0.0;
  int n_tls = 0;
  double big_g = 0.0;       // g N
  double e_max_norm = 0.0;  // E_max / (N w_z)
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

/// Sorted by (G, g, N).
std::vector<UniversalityRow> universality_scan(std::span<const double> g_values, std::span<const int> n_values,
                                               const GridPolicy& grid = {}, unsigned jobs = 1);

struct CollapseGroup {
  double big_g = 0.0;
  std::vector<const UniversalityRow*> members;
  double spread = 0.0;  // (max - min) / min of e_max_norm
};

/// Groups of rows sharing G (relative tolerance 1e-9) with at least two
/// members of N >= n_min; only those members are kept.
std::vector<CollapseGroup> collapse_groups(const std::vector<UniversalityRow>& rows, int n_min);

struct CurvePoint {
  double big_g = 0.0;
  double value = 0.0;
};

/// Largest-N row for every distinct G, ascending in G.
std::vector<CurvePoint> collapsed_curve(const std::vector<UniversalityRow>& rows);

/// G at which the non-uniform second difference of the collapsed curve peaks.
double detect_crossover(const std::vector<CurvePoint>& curve);

}  // namespace qbat
