#include "pathind/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pathind/error.hpp"

namespace pathind {

std::vector<double> residual_series(const PathRecord& path,
                                    const GirsanovSeries& series,
                                    const Potential& v) {
  std::vector<double> r(path.states.size());
  const double v0 = v.value(0.0, path.states[0]);
  r[0] = 0.0;
  for (std::size_t n = 1; n < r.size(); ++n) {
    const double dv =
        v.value(path.grid.time(static_cast<int>(n)), path.states[n]) - v0;
    r[n] = series.zhat[n] - dv;
  }
  return r;
}

namespace {

// Integer ratio a / b when it is one within 1e-9 relative, else 0.
long nested_ratio(double a, double b) {
  const double q = a / b;
  const double rq = std::round(q);
  if (rq < 1.0 || std::abs(q - rq) > 1e-9 * rq) return 0;
  return static_cast<long>(rq);
}

}  // namespace

StudyResult refinement_study(const FieldBundle& fb, const Potential& v,
                             const Vec& x0, double horizon,
                             std::span<const double> dt_list,
                             std::size_t n_paths, std::uint64_t seed,
                             const Thresholds& thresholds, int threads) {
  if (dt_list.empty()) {
    throw Error(ErrorKind::ConfigError, "dt_list: empty");
  }
  std::vector<int> steps;
  for (std::size_t k = 0; k < dt_list.size(); ++k) {
    const double dt = dt_list[k];
    if (!(dt > 0.0)) {
      throw Error(ErrorKind::ConfigError, "dt_list: entries must be positive");
    }
    const long n = nested_ratio(horizon, dt);
    if (n == 0) {
      throw Error(ErrorKind::ConfigError,
                  "dt_list[" + std::to_string(k) + "]: does not divide T");
    }
    if (k > 0) {
      if (!(dt < dt_list[k - 1]) || nested_ratio(dt_list[k - 1], dt) < 2) {
        throw Error(ErrorKind::ConfigError,
                    "dt_list[" + std::to_string(k) +
                        "]: must be strictly decreasing and divide the "
                        "previous entry");
      }
    }
    steps.push_back(static_cast<int>(n));
  }
  for (std::size_t k = 1; k < steps.size(); ++k) {
    if (steps[k] % steps[k - 1] != 0) {
      throw Error(ErrorKind::ConfigError,
                  "dt_list[" + std::to_string(k) + "]: grids are not nested");
    }
  }
  if (n_paths < 1) {
    throw Error(ErrorKind::ConfigError, "n_paths: must be at least 1");
  }

  const GaussianStream stream(seed);
  const int finest = steps.back();
  StudyResult study;
  study.total_paths = n_paths;

  for (std::size_t k = 0; k < steps.size(); ++k) {
    const TimeGrid grid(horizon, steps[k]);
    const int substeps = finest / steps[k];
    auto outcomes = map_paths(
        fb, x0, grid, stream, n_paths, threads,
        [&](const PathRecord& rec) {
          const GirsanovSeries series = density_process(fb, rec);
          const std::vector<double> r = residual_series(rec, series, v);
          PathTerminal out;
          out.path_id = rec.path_id;
          out.zhat = series.zhat.back();
          out.residual = r.back();
          out.potential_change = out.zhat - out.residual;
          for (double x : r)
            out.max_abs_residual = std::max(out.max_abs_residual, std::abs(x));
          return out;
        },
        substeps);

    LevelStats level;
    level.dt = grid.dt();
    level.steps = steps[k];
    level.substeps = substeps;
    double sum_r2 = 0.0, sum_r = 0.0, sum_z2 = 0.0;
    for (std::size_t p = 0; p < outcomes.size(); ++p) {
      if (outcomes[p].failure) {
        PathTerminal failed;
        failed.path_id = p;
        failed.failed = true;
        level.paths.push_back(failed);
        ++level.excluded;
        continue;
      }
      const PathTerminal& t = *outcomes[p].value;
      sum_r2 += t.residual * t.residual;
      sum_r += t.residual;
      sum_z2 += t.zhat * t.zhat;
      level.max_abs_residual = std::max(level.max_abs_residual, t.max_abs_residual);
      level.paths.push_back(t);
      ++level.paths_used;
    }
    if (level.paths_used > 0) {
      const auto n = static_cast<double>(level.paths_used);
      level.rms_residual = std::sqrt(sum_r2 / n);
      level.mean_residual = sum_r / n;
      level.rms_zhat = std::sqrt(sum_z2 / n);
    }
    study.total_excluded = std::max(study.total_excluded, level.excluded);
    study.levels.push_back(std::move(level));
  }

  study.exact = std::all_of(study.levels.begin(), study.levels.end(),
                            [&](const LevelStats& l) {
                              return l.rms_residual <= thresholds.exact_tol;
                            });
  if (study.exact) {
    study.fitted_order = std::nan("");
    return study;
  }
  const std::size_t m = study.levels.size();
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const auto& a = study.levels[k];
    const auto& b = study.levels[k + 1];
    study.successive_orders.push_back(std::log(a.rms_residual / b.rms_residual) /
                                      std::log(a.dt / b.dt));
  }
  if (m >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& l : study.levels) {
      const double x = std::log(l.dt);
      const double y = std::log(l.rms_residual);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double n = static_cast<double>(m);
    study.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    study.fitted_order = std::nan("");
  }
  return study;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::PathIndependent: return "path_independent";
    case Verdict::PathDependent: return "path_dependent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

VerdictResult verdict(const StudyResult& study, const CurlSummary& curl,
                      const Thresholds& th) {
  if (study.levels.size() < 3) {
    throw Error(ErrorKind::ConfigError,
                "verdict needs a study over at least 3 dt values");
  }
  if (study.total_paths < 100) {
    throw Error(ErrorKind::ConfigError,
                "verdict needs at least 100 paths per dt");
  }

  VerdictResult out;
  std::ostringstream why;
  const LevelStats& finest = study.levels.back();
  double min_rms = finest.rms_residual;
  for (const auto& l : study.levels) min_rms = std::min(min_rms, l.rms_residual);

  const double blowup = static_cast<double>(study.total_excluded) /
                        static_cast<double>(study.total_paths);
  out.converging = study.exact || (std::isfinite(study.fitted_order) &&
                                   study.fitted_order >= th.order_min);
  const double allowed = th.tau_abs + th.tau_rel * finest.rms_zhat;
  out.residual_ok = finest.rms_residual <= allowed;

  why << "finest dt " << finest.dt << ": residual RMS " << finest.rms_residual
      << " vs allowed " << allowed << "; ";
  if (study.exact) {
    why << "residual exact at every dt; ";
  } else {
    why << "fitted order " << study.fitted_order << " (minimum "
        << th.order_min << "); ";
  }
  why << "curl asymmetry " << curl.max_asymmetry << " (tolerance "
      << curl.tolerance << "). ";

  if (blowup > th.max_blowup_fraction) {
    out.verdict = Verdict::Inconclusive;
    why << "Too many blown-up paths (" << study.total_excluded << " of "
        << study.total_paths << ").";
  } else if (out.residual_ok && out.converging && curl.pass) {
    out.verdict = Verdict::PathIndependent;
    why << "Residual vanishes under refinement and the drift is curl-free.";
  } else if (curl.max_asymmetry > th.curl_fail ||
             (min_rms > 10.0 * th.tau_abs && !out.converging)) {
    out.verdict = Verdict::PathDependent;
    why << (curl.max_asymmetry > th.curl_fail
                ? "The drift is not of gradient form."
                : "The residual stays bounded away from zero under refinement.");
  } else {
    out.verdict = Verdict::Inconclusive;
    why << "Evidence is mixed.";
  }
  why << " Evidence covers only the region visited by the simulated paths.";
  out.explanation = why.str();
  return out;
}

}  // namespace pathind
