#include "pathind/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "pathind/burgers1d.hpp"
#include "pathind/config.hpp"
#include "pathind/error.hpp"
#include "pathind/girsanov.hpp"
#include "pathind/kpz.hpp"
#include "pathind/sde.hpp"
#include "pathind/verify.hpp"

namespace pathind {

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
  }
  return f;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto f = open_output(path);
  f << doc.dump(2) << "\n";
}

std::string x_header(int d) {
  std::string h;
  for (int k = 1; k <= d; ++k) h += ",x" + std::to_string(k);
  return h;
}

json thresholds_json(const Thresholds& t) {
  return {{"tau_abs", t.tau_abs},
          {"tau_rel", t.tau_rel},
          {"order_min", t.order_min},
          {"exact_tol", t.exact_tol},
          {"curl_fail", t.curl_fail},
          {"max_blowup_fraction", t.max_blowup_fraction}};
}

Box default_box(const Config& c) {
  if (c.gradient.box) return *c.gradient.box;
  Box b{c.x0, c.x0};
  for (int k = 0; k < c.dimension; ++k) {
    b.lower[k] -= 2.0;
    b.upper[k] += 2.0;
  }
  return b;
}

int cmd_simulate(const Config& c, const CommandOptions& o, std::ostream& out,
                 std::ostream& err) {
  const Scenario s = build_scenario(c);
  const TimeGrid grid(c.horizon, static_cast<int>(std::lround(c.horizon / c.finest_dt())));
  const GaussianStream stream(c.seed);
  auto chunks = map_paths(
      s.fields, c.x0, grid, stream, c.n_paths, o.threads,
      [&](const PathRecord& rec) {
        const GirsanovSeries g = density_process(s.fields, rec);
        std::string text;
        for (std::size_t n = 0; n < rec.states.size(); ++n) {
          text += std::to_string(rec.path_id) + "," + fmt(g.times[n]);
          for (int k = 0; k < c.dimension; ++k)
            text += "," + fmt(rec.states[n][k]);
          text += "," + fmt(g.zhat[n]) + "," + fmt(g.weight(n)) + "\n";
        }
        return text;
      });
  auto f = open_output(o.out_dir / "paths.csv");
  f << "path_id,t" << x_header(c.dimension) << ",zhat,weight\n";
  std::size_t failed = 0;
  for (const auto& ch : chunks) {
    if (ch.value) f << *ch.value;
    if (ch.failure) {
      ++failed;
      err << "warning: " << ch.failure->message << "\n";
    }
  }
  out << "simulate: " << (c.n_paths - failed) << " paths, " << grid.steps()
      << " steps, " << failed << " excluded -> "
      << (o.out_dir / "paths.csv").string() << "\n";
  return kExitOk;
}

CurlSummary curl_over_horizon(const Scenario& s, const Config& c) {
  CurlSummary curl;
  curl.pass = true;
  const Box box = default_box(c);
  for (double t : {0.0, 0.5 * c.horizon, c.horizon}) {
    const GradientCheck g = gradient_form_check(
        s.fields, t, box, c.gradient.n_samples, c.gradient.tolerance, c.seed);
    curl.max_asymmetry = std::max(curl.max_asymmetry, g.max_asymmetry);
    curl.tolerance = g.tolerance;
    curl.pass = curl.pass && g.pass;
  }
  return curl;
}

int cmd_verify(const Config& c, const CommandOptions& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario s = build_scenario(c);
  if (!s.potential) {
    throw Error(ErrorKind::ConfigError,
                "fields.v: verify needs a candidate potential");
  }
  const StudyResult study =
      refinement_study(s.fields, *s.potential, c.x0, c.horizon, c.dt_list,
                       c.n_paths, c.seed, c.thresholds, o.threads);
  const CurlSummary curl = curl_over_horizon(s, c);
  const VerdictResult v = verdict(study, curl, c.thresholds);

  {
    auto f = open_output(o.out_dir / "study.csv");
    f << "dt,steps,paths_used,excluded,rms_residual,max_abs_residual,"
         "mean_residual,rms_zhat,order_to_next\n";
    for (std::size_t k = 0; k < study.levels.size(); ++k) {
      const auto& l = study.levels[k];
      f << fmt(l.dt) << "," << l.steps << "," << l.paths_used << ","
        << l.excluded << "," << fmt(l.rms_residual) << ","
        << fmt(l.max_abs_residual) << "," << fmt(l.mean_residual) << ","
        << fmt(l.rms_zhat) << ","
        << (k < study.successive_orders.size() ? fmt(study.successive_orders[k])
                                               : std::string())
        << "\n";
    }
  }
  {
    auto f = open_output(o.out_dir / "terminal.csv");
    f << "dt,path_id,zhat,potential_change,residual,max_abs_residual,failed\n";
    for (const auto& l : study.levels) {
      for (const auto& p : l.paths) {
        f << fmt(l.dt) << "," << p.path_id << "," << fmt(p.zhat) << ","
          << fmt(p.potential_change) << "," << fmt(p.residual) << ","
          << fmt(p.max_abs_residual) << "," << (p.failed ? 1 : 0) << "\n";
      }
    }
  }

  json levels = json::array();
  for (const auto& l : study.levels) {
    levels.push_back({{"dt", l.dt},
                      {"steps", l.steps},
                      {"paths_used", l.paths_used},
                      {"excluded", l.excluded},
                      {"rms_residual", l.rms_residual},
                      {"max_abs_residual", l.max_abs_residual},
                      {"rms_zhat", l.rms_zhat}});
  }
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  json report = {
      {"command", "verify"},
      {"scenario", s.name},
      {"verdict", std::string(to_string(v.verdict))},
      {"explanation", v.explanation},
      {"seed", c.seed},
      {"n_paths", c.n_paths},
      {"levels", levels},
      {"successive_orders", study.successive_orders},
      {"fitted_order",
       study.exact ? json("exact") : json(study.fitted_order)},
      {"curl", {{"max_asymmetry", curl.max_asymmetry},
                {"tolerance", curl.tolerance},
                {"pass", curl.pass}}},
      {"thresholds", thresholds_json(c.thresholds)},
      {"runtime_seconds", runtime}};
  write_json(o.out_dir / "report.json", report);

  out << "verify: " << to_string(v.verdict) << "\n" << v.explanation << "\n";
  if (o.expect) {
    const Verdict want = *o.expect == "independent" ? Verdict::PathIndependent
                                                    : Verdict::PathDependent;
    if (v.verdict != want) {
      out << "expected path_" << *o.expect << "\n";
      return kExitFail;
    }
  }
  return kExitOk;
}

int cmd_kpz_solve(const Config& c, const CommandOptions& o, std::ostream& out) {
  if (c.dimension > 2) {
    throw Error(ErrorKind::ConfigError,
                "dimension: kpz-solve supports d = 1 or 2");
  }
  const Scenario s = build_scenario(c);
  const auto sigma = constant_sigma(c);
  if (!sigma) {
    throw Error(ErrorKind::ConfigError,
                "fields.sigma: kpz-solve needs a constant sigma");
  }
  if (!s.potential) {
    throw Error(ErrorKind::ConfigError,
                "fields.v: kpz-solve takes terminal data from the potential");
  }
  const Potential& v = *s.potential;
  GridField terminal(c.solver.axes, c.horizon);
  terminal.sample([&](double t, const Vec& x) { return v.value(t, x); });
  ColeHopfOptions opts;
  opts.steps = c.solver.steps;
  opts.output_every = c.solver.output_every;
  const auto snaps = cole_hopf_solve(terminal, *sigma, opts);

  const double layer = boundary_layer_width(*sigma, c.horizon);
  double max_err = 0.0;
  double tmin = terminal.values()[0], tmax = tmin;
  for (double x : terminal.values()) tmin = std::min(tmin, x), tmax = std::max(tmax, x);
  bool max_principle = true;
  std::size_t interior = 0;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const GridField& g = snaps[k];
    auto f = open_output(o.out_dir / ("kpz_" + std::to_string(k) + ".csv"));
    std::string h = x_header(c.dimension);
    f << h.substr(1) << ",t,v\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec x = g.point(i);
      for (int d = 0; d < c.dimension; ++d) f << fmt(x[d]) << ",";
      f << fmt(g.time()) << "," << fmt(g.values()[i]) << "\n";
      if (g.values()[i] > tmax || g.values()[i] < tmin) max_principle = false;
      if (g.boundary_distance(i) >= layer) {
        if (k == 0) ++interior;
        max_err = std::max(max_err,
                           std::abs(g.values()[i] - v.value(g.time(), x)));
      }
    }
  }
  const bool pass = max_err <= c.solver.tolerance && max_principle;
  json summary = {{"command", "kpz-solve"},
                  {"snapshots", snaps.size()},
                  {"boundary_layer", layer},
                  {"interior_nodes", interior},
                  {"max_interior_error", max_err},
                  {"tolerance", c.solver.tolerance},
                  {"max_principle", max_principle},
                  {"pass", pass}};
  write_json(o.out_dir / "kpz_summary.json", summary);
  out << "kpz-solve: " << snaps.size() << " snapshots, max interior error "
      << max_err << " (tolerance " << c.solver.tolerance << "), max principle "
      << (max_principle ? "holds" : "violated") << "\n";
  return pass ? kExitOk : kExitFail;
}

int cmd_burgers_check(const Config& c, const CommandOptions& o,
                      std::ostream& out) {
  if (c.dimension != 1) {
    throw Error(ErrorKind::ConfigError, "dimension: burgers-check needs d = 1");
  }
  const Scenario s = build_scenario(c);
  const FieldBundle fb = s.fields;
  const Field1D b = [fb](double t, double x) { return fb.drift(t, Vec{x})[0]; };
  const Field1D sig = [fb](double t, double x) {
    return fb.sigma(t, Vec{x})(0, 0);
  };
  StructureFunction phi;
  if (c.burgers.phi && c.burgers.phi->expression) {
    phi = StructureFunction::from_function(
        [e = *c.burgers.phi->expression](double r) { return e.eval(0.0, Vec{r}); });
  } else if (c.burgers.phi) {
    phi = StructureFunction::from_monomial(c.burgers.phi->monomial->coefficient,
                                           c.burgers.phi->monomial->power);
  } else {
    const auto sigma = constant_sigma(c);
    if (!sigma) {
      throw Error(ErrorKind::ConfigError,
                  "burgers.phi: required when sigma is not constant");
    }
    phi = StructureFunction::from_monomial((*sigma)(0, 0) * (*sigma)(0, 0), 1.0);
  }
  const Burgers1DModel model =
      make_burgers_model(u_from_coefficients(b, sig), phi, c.burgers.r_ref);

  auto f = open_output(o.out_dir / "burgers.csv");
  f << "t,x,u,residual,phi_mismatch\n";
  double max_res = 0.0;
  double max_mismatch = 0.0;
  const int n = c.burgers.n_points;
  const std::vector<double> times =
      c.burgers.stationary ? std::vector<double>{0.0} : c.burgers.times;
  for (double t : times) {
    for (int i = 0; i < n; ++i) {
      const double x = n == 1 ? c.burgers.x_min
                              : c.burgers.x_min + i * (c.burgers.x_max - c.burgers.x_min) / (n - 1);
      const double r = c.burgers.stationary
                           ? harmonic_residual(model, x, c.burgers.h)
                           : burgers_residual(model, t, x, c.burgers.h);
      const double mm = phi_mismatch(b, model, t, x);
      max_res = std::max(max_res, std::abs(r));
      max_mismatch = std::max(
          max_mismatch, mm / (1.0 + std::abs(b(t, x))));
      f << fmt(t) << "," << fmt(x) << "," << fmt(model.u(t, x)) << ","
        << fmt(r) << "," << fmt(mm) << "\n";
    }
  }
  const bool pass = max_res <= c.burgers.tolerance && max_mismatch <= 1e-8;
  json summary = {{"command", "burgers-check"},
                  {"stationary", c.burgers.stationary},
                  {"psi1_closed_form", model.psi.psi1_closed_form},
                  {"max_abs_residual", max_res},
                  {"max_relative_phi_mismatch", max_mismatch},
                  {"tolerance", c.burgers.tolerance},
                  {"pass", pass}};
  write_json(o.out_dir / "burgers_summary.json", summary);
  out << "burgers-check: max |residual| " << max_res << ", max Phi mismatch "
      << max_mismatch << " -> " << (pass ? "pass" : "fail") << "\n";
  return pass ? kExitOk : kExitFail;
}

int cmd_gradient_check(const Config& c, const CommandOptions& o,
                       std::ostream& out) {
  const Scenario s = build_scenario(c);
  const GradientCheck g =
      gradient_form_check(s.fields, c.gradient.t, default_box(c),
                          c.gradient.n_samples, c.gradient.tolerance, c.seed);
  json summary = {{"command", "gradient-check"},
                  {"t", c.gradient.t},
                  {"samples", g.samples},
                  {"max_asymmetry", g.max_asymmetry},
                  {"tolerance", g.tolerance},
                  {"worst_point", std::vector<double>(g.worst_point.values().begin(),
                                                      g.worst_point.values().end())},
                  {"pass", g.pass}};
  write_json(o.out_dir / "gradient.json", summary);
  out << "gradient-check: max asymmetry " << g.max_asymmetry << " (tolerance "
      << g.tolerance << ") -> " << (g.pass ? "pass" : "fail") << "\n";
  return g.pass ? kExitOk : kExitFail;
}

int cmd_martingale_check(const Config& c, const CommandOptions& o,
                         std::ostream& out) {
  const Scenario s = build_scenario(c);
  const TimeGrid grid(c.horizon, static_cast<int>(std::lround(c.horizon / c.finest_dt())));
  const GaussianStream stream(c.seed);
  auto outcomes = map_paths(s.fields, c.x0, grid, stream, c.n_paths, o.threads,
                            [&](const PathRecord& rec) {
                              const GirsanovSeries g = density_process(s.fields, rec);
                              return g.weight(g.zhat.size() - 1);
                            });
  std::vector<double> weights;
  std::size_t failed = 0;
  for (const auto& oc : outcomes) {
    if (oc.value) weights.push_back(*oc.value);
    else ++failed;
  }
  const MartingaleCheck m = martingale_check(weights);
  json summary = {{"command", "martingale-check"},
                  {"n_paths", m.n},
                  {"excluded", failed},
                  {"mean", m.mean},
                  {"stderr", m.std_error},
                  {"pass", m.pass}};
  write_json(o.out_dir / "martingale.json", summary);
  out << "martingale-check: mean " << fmt(m.mean) << ", stderr "
      << fmt(m.std_error) << " -> " << (m.pass ? "pass" : "fail") << "\n";
  return m.pass ? kExitOk : kExitFail;
}

}  // namespace

int run_command(const CommandOptions& options, std::ostream& out,
                std::ostream& err) {
  try {
    if (options.expect && *options.expect != "independent" &&
        *options.expect != "dependent") {
      throw Error(ErrorKind::ConfigError,
                  "--expect: must be 'independent' or 'dependent'");
    }
    if (options.threads < 1) {
      throw Error(ErrorKind::ConfigError, "--threads: must be at least 1");
    }
    Config c = load_config(options.config);
    if (options.seed) c.seed = *options.seed;
    std::filesystem::create_directories(options.out_dir);

    const std::string& cmd = options.command;
    if (cmd == "simulate") return cmd_simulate(c, options, out, err);
    if (cmd == "verify") return cmd_verify(c, options, out);
    if (cmd == "kpz-solve") return cmd_kpz_solve(c, options, out);
    if (cmd == "burgers-check") return cmd_burgers_check(c, options, out);
    if (cmd == "gradient-check") return cmd_gradient_check(c, options, out);
    if (cmd == "martingale-check") return cmd_martingale_check(c, options, out);
    throw Error(ErrorKind::ConfigError, "unknown command '" + cmd + "'");
  } catch (const Error& e) {
    err << json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}
               .dump()
        << "\n";
  } catch (const std::exception& e) {
    err << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << "\n";
  }
  return kExitError;
}

}  // namespace pathind
