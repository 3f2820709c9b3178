#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pathind/burgers1d.hpp"
#include "pathind/expr.hpp"
#include "pathind/fields.hpp"
#include "pathind/kpz.hpp"
#include "pathind/verify.hpp"

namespace pathind {

struct ScenarioConfig {
  std::string name;
  Vec c;          // linear
  Mat sigma;      // linear
  double sigma0 = 1.0;  // bridge, ou1d
  double t0 = 2.0;      // bridge
  double kappa = 1.0;   // rotational
  double theta = 1.0;   // ou1d
  double m = 2.0;       // porous1d
  double level = 1.0;   // porous1d constant solution u = level
};

struct ExplicitFields {
  std::vector<Expr> drift;  // empty when the drift comes from the potential
  bool drift_from_potential = false;
  std::vector<std::vector<Expr>> sigma;
  std::optional<Expr> v;
  std::optional<std::vector<Expr>> v_gradient;
  std::optional<std::vector<std::vector<Expr>>> v_hessian;
  std::optional<Expr> v_time_derivative;
};

struct SolverConfig {
  std::vector<Axis> axes;  // defaults to [-5, 5] with 201 points per axis
  int steps = 0;
  int output_every = 0;
  double tolerance = 1e-3;
};

struct PhiConfig {
  std::optional<StructureFunction::Monomial> monomial;
  std::optional<Expr> expression;  // in x1, standing for r
};

struct BurgersConfig {
  std::optional<PhiConfig> phi;  // default: Phi(r) = sigma^2 r for constant sigma
  double r_ref = 0.0;
  double x_min = -2.0;
  double x_max = 2.0;
  int n_points = 41;
  std::vector<double> times;  // default {0, T/2}
  double h = 1e-3;
  double tolerance = 1e-4;
  bool stationary = false;
};

struct GradientConfig {
  double t = 0.0;
  std::optional<Box> box;  // default x0 +- 2
  int n_samples = 200;
  std::optional<double> tolerance;
};

struct Config {
  int dimension = 1;
  double horizon = 1.0;
  std::vector<double> dt_list;  // a single "dt" becomes a one-entry list
  std::size_t n_paths = 100;
  std::uint64_t seed = 42;
  Vec x0;
  std::optional<ScenarioConfig> scenario;
  std::optional<ExplicitFields> fields;
  SolverConfig solver;
  BurgersConfig burgers;
  GradientConfig gradient;
  Thresholds thresholds;

  [[nodiscard]] double finest_dt() const { return dt_list.back(); }
};

// Throws ConfigError naming the offending field.
Config load_config(const std::filesystem::path& path);
Config parse_config(std::string_view json_text);

Scenario build_scenario(const Config& config);

// True when every sigma entry is free of t and x, or the scenario is built
// with a constant sigma.
std::optional<Mat> constant_sigma(const Config& config);

}  // namespace pathind
