#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pathind/fields.hpp"

namespace pathind {

// R = dv/dt + (Tr(a Hess v) + |sigma^T grad v|^2) / 2. Zero exactly where v
// solves the time-reversed KPZ equation.
double kpz_residual(const Potential& v, const FieldBundle& fb, double t,
                    const Vec& x);

struct Box {
  Vec lower;
  Vec upper;
};

struct GradientCheck {
  double max_asymmetry = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  int samples = 0;
  Vec worst_point;
};

// Samples F = a^{-1} b inside the box and reports the largest
// |dF_j/dx_i - dF_i/dx_j| from central differences. A gradient drift has a
// symmetric Jacobian of F. Default tolerance is 1e-8, or 1e-4 when the drift
// itself is built from finite differences.
GradientCheck gradient_form_check(const FieldBundle& fb, double t,
                                  const Box& region, int n_samples,
                                  std::optional<double> tolerance = std::nullopt,
                                  std::uint64_t seed = 0);

struct Axis {
  double lower = 0.0;
  double upper = 1.0;
  int points = 3;

  [[nodiscard]] double spacing() const { return (upper - lower) / (points - 1); }
  [[nodiscard]] double coord(int i) const { return lower + i * spacing(); }
};

// Scalar values on a 1D or 2D tensor grid, x1 varying fastest.
class GridField {
 public:
  GridField(std::vector<Axis> axes, double time);

  [[nodiscard]] int dimension() const { return static_cast<int>(axes_.size()); }
  [[nodiscard]] const std::vector<Axis>& axes() const { return axes_; }
  [[nodiscard]] double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::vector<double>& values() { return values_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

  [[nodiscard]] Vec point(std::size_t flat) const;
  // Distance from node `flat` to the nearest grid boundary.
  [[nodiscard]] double boundary_distance(std::size_t flat) const;
  [[nodiscard]] bool on_boundary(std::size_t flat) const;

  // Fills values with f(time, x) at every node.
  void sample(const ScalarField& f);

 private:
  std::vector<Axis> axes_;
  double time_;
  std::vector<double> values_;
};

struct ColeHopfOptions {
  // Number of explicit steps from T down to t_end. 0 selects the smallest
  // count satisfying ds <= 0.25 dx^2 / max a_ii.
  int steps = 0;
  // Snapshot every this many steps; 0 keeps only the first and last.
  int output_every = 0;
  double t_end = 0.0;
};

// Solves the time-reversed KPZ equation backwards from terminal data for a
// constant sigma, via w = exp(v - max v_T) and the heat equation
// dw/ds = Tr(a Hess w) / 2 in s = T - t. Zero-flux boundaries.
// Returns snapshots ordered from t = T down to t_end.
//
// Throws UnstableParameters when the requested step count violates the
// stability bound, NonPositiveW when w underflows, and ConfigError for a
// forward-in-time request.
std::vector<GridField> cole_hopf_solve(const GridField& terminal,
                                       const Mat& sigma,
                                       const ColeHopfOptions& options = {});

// Width of the zone next to the boundary where the zero-flux condition
// pollutes the solution over the given horizon: 4 sqrt(max a_ii * horizon).
double boundary_layer_width(const Mat& sigma, double horizon);

// Finite-difference KPZ residual of a pair of successive snapshots, evaluated
// at the nodes of `earlier`; boundary nodes are reported as 0.
std::vector<double> grid_kpz_residual(const GridField& earlier,
                                      const GridField& later, const Mat& sigma);

}  // namespace pathind
