#include "pathind/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "pathind/error.hpp"

namespace pathind {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path,
                               const std::string& reason) {
  throw Error(ErrorKind::ConfigError, path + ": " + reason);
}

void allow_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> keys) {
  if (!j.is_object()) config_error(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) config_error(path + "." + k, "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error(path, "must be finite");
  return v;
}

double number_or(const json& obj, const char* key, const std::string& path,
                 double fallback) {
  return obj.contains(key) ? number(obj.at(key), path + "." + key) : fallback;
}

long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) config_error(path, "expected an integer");
  return j.get<long>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) config_error(path, "expected a string");
  return j.get<std::string>();
}

Vec vector_of(const json& j, const std::string& path, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    config_error(path, "expected an array of " + std::to_string(dim) + " numbers");
  }
  Vec v(dim);
  for (int i = 0; i < dim; ++i)
    v[i] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Mat matrix_of(const json& j, const std::string& path, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    config_error(path, "expected " + std::to_string(dim) + " rows");
  }
  Mat m(dim);
  for (int i = 0; i < dim; ++i) {
    const Vec row = vector_of(j[i], path + "[" + std::to_string(i) + "]", dim);
    for (int k = 0; k < dim; ++k) m(i, k) = row[k];
  }
  return m;
}

Expr expression(const json& j, const std::string& path, int dim) {
  const std::string text = string(j, path);
  try {
    return Expr::parse(text, dim);
  } catch (const SyntaxError& e) {
    config_error(path, std::string("syntax error ") + e.what());
  } catch (const Error& e) {
    config_error(path, std::string(to_string(e.kind())) + ": " + e.what());
  }
}

std::vector<Expr> expression_vector(const json& j, const std::string& path,
                                    int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    config_error(path, "expected " + std::to_string(dim) + " expressions");
  }
  std::vector<Expr> out;
  for (int i = 0; i < dim; ++i)
    out.push_back(expression(j[i], path + "[" + std::to_string(i) + "]", dim));
  return out;
}

std::vector<std::vector<Expr>> expression_matrix(const json& j,
                                                 const std::string& path,
                                                 int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    config_error(path, "expected " + std::to_string(dim) + " rows");
  }
  std::vector<std::vector<Expr>> out;
  for (int i = 0; i < dim; ++i)
    out.push_back(
        expression_vector(j[i], path + "[" + std::to_string(i) + "]", dim));
  return out;
}

ScenarioConfig parse_scenario(const json& root, int dim) {
  ScenarioConfig s;
  s.name = string(root.at("scenario"), "scenario");
  const json params = root.value("params", json::object());
  const std::string p = "params";
  if (s.name == "linear") {
    allow_keys(params, p, {"c", "sigma"});
    s.c = params.contains("c") ? vector_of(params["c"], p + ".c", dim)
                               : Vec(dim, 1.0);
    s.sigma = params.contains("sigma")
                  ? matrix_of(params["sigma"], p + ".sigma", dim)
                  : Mat::identity(dim);
  } else if (s.name == "bridge") {
    allow_keys(params, p, {"sigma0", "T0"});
    s.sigma0 = number_or(params, "sigma0", p, 1.0);
    s.t0 = number_or(params, "T0", p, 2.0);
    if (!(s.sigma0 > 0.0)) config_error(p + ".sigma0", "must be positive");
  } else if (s.name == "rotational") {
    allow_keys(params, p, {"kappa"});
    if (dim != 2) config_error("dimension", "rotational scenario needs d = 2");
    s.kappa = number_or(params, "kappa", p, 1.0);
  } else if (s.name == "ou1d") {
    allow_keys(params, p, {"theta", "sigma0"});
    if (dim != 1) config_error("dimension", "ou1d scenario needs d = 1");
    s.theta = number_or(params, "theta", p, 1.0);
    s.sigma0 = number_or(params, "sigma0", p, 1.0);
    if (!(s.sigma0 > 0.0)) config_error(p + ".sigma0", "must be positive");
  } else if (s.name == "porous1d") {
    allow_keys(params, p, {"m", "c"});
    if (dim != 1) config_error("dimension", "porous1d scenario needs d = 1");
    s.m = number_or(params, "m", p, 2.0);
    s.level = number_or(params, "c", p, 1.0);
    if (!(s.m >= 1.0) || !(s.level > 0.0))
      config_error(p, "porous1d needs m >= 1 and c > 0");
  } else {
    config_error("scenario", "unknown scenario '" + s.name +
                                 "' (linear, bridge, rotational, ou1d, porous1d)");
  }
  return s;
}

ExplicitFields parse_fields(const json& j, int dim) {
  const std::string p = "fields";
  allow_keys(j, p, {"drift", "sigma", "v", "v_gradient", "v_hessian",
                    "v_time_derivative"});
  ExplicitFields f;
  if (!j.contains("drift")) config_error(p + ".drift", "missing");
  if (!j.contains("sigma")) config_error(p + ".sigma", "missing");
  if (j["drift"].is_string()) {
    if (j["drift"] != "gradient") {
      config_error(p + ".drift",
                   "expected an array of expressions or \"gradient\"");
    }
    f.drift_from_potential = true;
  } else {
    f.drift = expression_vector(j["drift"], p + ".drift", dim);
  }
  f.sigma = expression_matrix(j["sigma"], p + ".sigma", dim);
  if (j.contains("v")) f.v = expression(j["v"], p + ".v", dim);
  if (j.contains("v_gradient"))
    f.v_gradient = expression_vector(j["v_gradient"], p + ".v_gradient", dim);
  if (j.contains("v_hessian"))
    f.v_hessian = expression_matrix(j["v_hessian"], p + ".v_hessian", dim);
  if (j.contains("v_time_derivative"))
    f.v_time_derivative =
        expression(j["v_time_derivative"], p + ".v_time_derivative", dim);
  if (!f.v && (f.v_gradient || f.v_hessian || f.v_time_derivative)) {
    config_error(p + ".v", "derivatives given without the potential");
  }
  if (f.drift_from_potential && !f.v) {
    config_error(p + ".drift", "\"gradient\" drift needs fields.v");
  }
  return f;
}

std::vector<double> parse_dt(const json& root, double horizon) {
  std::vector<double> dts;
  if (root.contains("dt") && root.contains("dt_list")) {
    config_error("dt", "give either dt or dt_list, not both");
  }
  if (root.contains("dt")) {
    dts.push_back(number(root["dt"], "dt"));
  } else if (root.contains("dt_list")) {
    const json& l = root["dt_list"];
    if (!l.is_array() || l.empty()) config_error("dt_list", "expected a non-empty array");
    for (std::size_t i = 0; i < l.size(); ++i)
      dts.push_back(number(l[i], "dt_list[" + std::to_string(i) + "]"));
  } else {
    config_error("dt", "missing (give dt or dt_list)");
  }
  const std::string name = root.contains("dt") ? "dt" : "dt_list";
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const std::string p =
        root.contains("dt") ? name : name + "[" + std::to_string(i) + "]";
    if (!(dts[i] > 0.0)) config_error(p, "must be positive");
    const double q = horizon / dts[i];
    if (std::abs(q - std::round(q)) > 1e-12 * q || std::round(q) < 1.0) {
      config_error(p, "does not divide T");
    }
    if (i > 0 && !(dts[i] < dts[i - 1])) {
      config_error(p, "dt_list must be strictly decreasing");
    }
  }
  return dts;
}

SolverConfig parse_solver(const json& j, int dim) {
  SolverConfig s;
  const std::string p = "solver";
  allow_keys(j, p, {"x_min", "x_max", "n_points", "steps", "output_every",
                    "tolerance"});
  const double lo = number_or(j, "x_min", p, -5.0);
  const double hi = number_or(j, "x_max", p, 5.0);
  const long n = j.contains("n_points") ? integer(j["n_points"], p + ".n_points")
                                        : 201;
  if (!(hi > lo)) config_error(p + ".x_max", "must exceed x_min");
  if (n < 3) config_error(p + ".n_points", "must be at least 3");
  for (int k = 0; k < dim; ++k) s.axes.push_back(Axis{lo, hi, static_cast<int>(n)});
  if (j.contains("steps")) s.steps = static_cast<int>(integer(j["steps"], p + ".steps"));
  if (j.contains("output_every"))
    s.output_every =
        static_cast<int>(integer(j["output_every"], p + ".output_every"));
  s.tolerance = number_or(j, "tolerance", p, 1e-3);
  return s;
}

BurgersConfig parse_burgers(const json& j, double horizon) {
  BurgersConfig b;
  const std::string p = "burgers";
  allow_keys(j, p, {"phi", "r_ref", "x_min", "x_max", "n_points", "times", "h",
                    "tolerance", "stationary"});
  if (j.contains("phi")) {
    const json& f = j["phi"];
    allow_keys(f, p + ".phi", {"coefficient", "power", "expression"});
    PhiConfig phi;
    if (f.contains("expression")) {
      phi.expression = expression(f["expression"], p + ".phi.expression", 1);
    } else {
      phi.monomial = StructureFunction::Monomial{
          number_or(f, "coefficient", p + ".phi", 1.0),
          number_or(f, "power", p + ".phi", 1.0)};
    }
    b.phi = phi;
  }
  b.r_ref = number_or(j, "r_ref", p, 0.0);
  b.x_min = number_or(j, "x_min", p, -2.0);
  b.x_max = number_or(j, "x_max", p, 2.0);
  if (!(b.x_max > b.x_min)) config_error(p + ".x_max", "must exceed x_min");
  if (j.contains("n_points"))
    b.n_points = static_cast<int>(integer(j["n_points"], p + ".n_points"));
  if (b.n_points < 1) config_error(p + ".n_points", "must be positive");
  if (j.contains("times")) {
    const json& t = j["times"];
    if (!t.is_array()) config_error(p + ".times", "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i)
      b.times.push_back(number(t[i], p + ".times[" + std::to_string(i) + "]"));
  } else {
    b.times = {0.0, 0.5 * horizon};
  }
  b.h = number_or(j, "h", p, 1e-3);
  if (!(b.h > 0.0)) config_error(p + ".h", "must be positive");
  b.tolerance = number_or(j, "tolerance", p, 1e-4);
  if (j.contains("stationary")) {
    if (!j["stationary"].is_boolean())
      config_error(p + ".stationary", "expected a boolean");
    b.stationary = j["stationary"].get<bool>();
  }
  return b;
}

GradientConfig parse_gradient(const json& j, int dim) {
  GradientConfig g;
  const std::string p = "gradient_check";
  allow_keys(j, p, {"t", "lower", "upper", "n_samples", "tolerance"});
  g.t = number_or(j, "t", p, 0.0);
  if (j.contains("lower") != j.contains("upper")) {
    config_error(p, "give both lower and upper");
  }
  if (j.contains("lower")) {
    g.box = Box{vector_of(j["lower"], p + ".lower", dim),
                vector_of(j["upper"], p + ".upper", dim)};
  }
  if (j.contains("n_samples"))
    g.n_samples = static_cast<int>(integer(j["n_samples"], p + ".n_samples"));
  if (g.n_samples < 1) config_error(p + ".n_samples", "must be positive");
  if (j.contains("tolerance")) g.tolerance = number(j["tolerance"], p + ".tolerance");
  return g;
}

Thresholds parse_thresholds(const json& j) {
  Thresholds t;
  const std::string p = "thresholds";
  allow_keys(j, p, {"tau_abs", "tau_rel", "order_min", "exact_tol", "curl_fail",
                    "max_blowup_fraction"});
  t.tau_abs = number_or(j, "tau_abs", p, t.tau_abs);
  t.tau_rel = number_or(j, "tau_rel", p, t.tau_rel);
  t.order_min = number_or(j, "order_min", p, t.order_min);
  t.exact_tol = number_or(j, "exact_tol", p, t.exact_tol);
  t.curl_fail = number_or(j, "curl_fail", p, t.curl_fail);
  t.max_blowup_fraction =
      number_or(j, "max_blowup_fraction", p, t.max_blowup_fraction);
  return t;
}

Config from_json(const json& root) {
  allow_keys(root, "config",
             {"dimension", "T", "dt", "dt_list", "n_paths", "seed", "x0",
              "scenario", "params", "fields", "solver", "burgers",
              "gradient_check", "thresholds", "description"});
  Config c;
  if (!root.contains("dimension")) config_error("dimension", "missing");
  const long dim = integer(root["dimension"], "dimension");
  if (dim < 1 || dim > kMaxDim) config_error("dimension", "must be in 1..8");
  c.dimension = static_cast<int>(dim);
  if (!root.contains("T")) config_error("T", "missing");
  c.horizon = number(root["T"], "T");
  if (!(c.horizon > 0.0)) config_error("T", "must be positive");
  c.dt_list = parse_dt(root, c.horizon);
  if (root.contains("n_paths")) {
    const long n = integer(root["n_paths"], "n_paths");
    if (n < 1) config_error("n_paths", "must be at least 1");
    c.n_paths = static_cast<std::size_t>(n);
  }
  if (root.contains("seed")) {
    const long s = integer(root["seed"], "seed");
    if (s < 0) config_error("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  c.x0 = root.contains("x0") ? vector_of(root["x0"], "x0", c.dimension)
                             : Vec(c.dimension);

  const bool has_scenario = root.contains("scenario");
  const bool has_fields = root.contains("fields");
  if (has_scenario == has_fields) {
    config_error("scenario", "exactly one of scenario or fields is required");
  }
  if (has_scenario) {
    c.scenario = parse_scenario(root, c.dimension);
    if (c.scenario->name == "bridge" && !(c.scenario->t0 > c.horizon)) {
      config_error("params.T0", "bridge needs T0 > T");
    }
  } else {
    if (root.contains("params")) config_error("params", "only valid with scenario");
    c.fields = parse_fields(root["fields"], c.dimension);
  }
  c.solver = parse_solver(root.value("solver", json::object()), c.dimension);
  c.burgers = parse_burgers(root.value("burgers", json::object()), c.horizon);
  c.gradient =
      parse_gradient(root.value("gradient_check", json::object()), c.dimension);
  c.thresholds = parse_thresholds(root.value("thresholds", json::object()));
  return c;
}

}  // namespace

Config parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError,
                "config: malformed JSON at byte " + std::to_string(e.byte));
  }
  return from_json(root);
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::ConfigError,
                "config: cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

Potential potential_from(const ExplicitFields& f, int dim) {
  const Expr v = *f.v;
  Potential pot(dim, [v](double t, const Vec& x) { return v.eval(t, x); });
  if (f.v_gradient) {
    pot.with_gradient([g = *f.v_gradient](double t, const Vec& x) {
      Vec out(static_cast<int>(g.size()));
      for (std::size_t i = 0; i < g.size(); ++i)
        out[static_cast<int>(i)] = g[i].eval(t, x);
      return out;
    });
  }
  if (f.v_hessian) {
    pot.with_hessian([h = *f.v_hessian](double t, const Vec& x) {
      const int n = static_cast<int>(h.size());
      Mat out(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = h[i][j].eval(t, x);
      return out;
    });
  }
  if (f.v_time_derivative) {
    pot.with_time_derivative([e = *f.v_time_derivative](double t, const Vec& x) {
      return e.eval(t, x);
    });
  }
  return pot;
}

}  // namespace

Scenario build_scenario(const Config& config) {
  const int d = config.dimension;
  if (config.scenario) {
    const ScenarioConfig& s = *config.scenario;
    if (s.name == "linear") return linear_scenario(s.c, s.sigma);
    if (s.name == "bridge") return bridge_scenario(d, s.sigma0, s.t0);
    if (s.name == "rotational") return rotational_scenario(s.kappa);
    if (s.name == "ou1d") return ou1d_scenario(s.theta, s.sigma0);
    return porous1d_scenario(s.m, s.level);
  }
  const ExplicitFields& f = *config.fields;
  Scenario out;
  out.name = "custom";
  out.fields.dimension = d;
  out.fields.sigma = [sig = f.sigma, d](double t, const Vec& x) {
    Mat m(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = sig[i][j].eval(t, x);
    return m;
  };
  if (f.v) out.potential = potential_from(f, d);
  if (f.drift_from_potential) {
    out.fields.drift = drift_from_potential(*out.potential, out.fields.sigma);
    out.fields.drift_uses_fd = !f.v_gradient.has_value();
  } else {
    out.fields.drift = [b = f.drift](double t, const Vec& x) {
      Vec out(static_cast<int>(b.size()));
      for (std::size_t i = 0; i < b.size(); ++i)
        out[static_cast<int>(i)] = b[i].eval(t, x);
      return out;
    };
  }
  out.constant_sigma = constant_sigma(config);
  return out;
}

std::optional<Mat> constant_sigma(const Config& config) {
  if (config.scenario) {
    const ScenarioConfig& s = *config.scenario;
    const int d = config.dimension;
    if (s.name == "linear") return s.sigma;
    if (s.name == "bridge") return s.sigma0 * Mat::identity(d);
    if (s.name == "rotational") return Mat::identity(2);
    if (s.name == "ou1d") return Mat{{s.sigma0}};
    return Mat{{std::sqrt(s.m) * std::pow(s.level, 0.5 * (s.m - 1.0))}};
  }
  const auto& sig = config.fields->sigma;
  const int d = config.dimension;
  Mat m(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Expr& e = sig[i][j];
      if (e.uses_time() || e.max_variable_index() > 0) return std::nullopt;
      m(i, j) = e.eval(0.0, Vec(d));
    }
  }
  return m;
}

}  // namespace pathind
