#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pathind/fields.hpp"
#include "pathind/girsanov.hpp"
#include "pathind/kpz.hpp"
#include "pathind/sde.hpp"

namespace pathind {

// R_n = zhat[n] - (v(t_n, X_n) - v(0, X_0)); R_0 = 0.
std::vector<double> residual_series(const PathRecord& path,
                                    const GirsanovSeries& series,
                                    const Potential& v);

struct Thresholds {
  double tau_abs = 1e-3;
  double tau_rel = 0.1;
  double order_min = 0.4;
  // Residual RMS at or below this at every dt is flagged exact.
  double exact_tol = 1e-10;
  // Curl asymmetry above this is conclusive evidence against gradient form.
  double curl_fail = 0.1;
  double max_blowup_fraction = 0.01;
};

struct PathTerminal {
  std::uint64_t path_id = 0;
  double zhat = 0.0;
  double potential_change = 0.0;
  double residual = 0.0;
  double max_abs_residual = 0.0;  // over all grid times
  bool failed = false;
};

struct LevelStats {
  double dt = 0.0;
  int steps = 0;
  int substeps = 1;  // aggregation factor relative to the finest grid
  std::size_t paths_used = 0;
  std::size_t excluded = 0;
  double rms_residual = 0.0;
  double max_abs_residual = 0.0;
  double mean_residual = 0.0;
  double rms_zhat = 0.0;
  std::vector<PathTerminal> paths;
};

struct StudyResult {
  std::vector<LevelStats> levels;       // in dt_list order
  std::vector<double> successive_orders;
  double fitted_order = 0.0;            // least-squares slope of log RMS
  bool exact = false;
  std::size_t total_paths = 0;
  std::size_t total_excluded = 0;
};

// Coupled refinement: all levels are driven by the finest grid's increments,
// aggregated by summation. Throws ConfigError unless dt_list is strictly
// decreasing, nested, and every dt divides T.
StudyResult refinement_study(const FieldBundle& fb, const Potential& v,
                             const Vec& x0, double horizon,
                             std::span<const double> dt_list,
                             std::size_t n_paths, std::uint64_t seed,
                             const Thresholds& thresholds = {},
                             int threads = 1);

struct CurlSummary {
  double max_asymmetry = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

enum class Verdict { PathIndependent, PathDependent, Inconclusive };

std::string_view to_string(Verdict v);

struct VerdictResult {
  Verdict verdict = Verdict::Inconclusive;
  std::string explanation;
  bool residual_ok = false;
  bool converging = false;
};

// path_independent: finest RMS <= tau_abs + tau_rel RMS(zhat), the residual
// converges (exact or fitted order >= order_min) and the curl test passes.
// path_dependent: curl asymmetry > curl_fail, or the residual stays above
// 10 tau_abs at every dt without converging. Anything else is inconclusive,
// as is a study with more than max_blowup_fraction of paths excluded.
VerdictResult verdict(const StudyResult& study, const CurlSummary& curl,
                      const Thresholds& thresholds = {});

}  // namespace pathind
