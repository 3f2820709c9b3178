#pragma once

#include <span>
#include <vector>

#include "pathind/fields.hpp"
#include "pathind/sde.hpp"

namespace pathind {

// The two pieces of dZ = <sigma^{-1} b, dB> + |sigma^{-1} b|^2 dt / 2,
// evaluated at the left endpoint.
struct ZhatParts {
  double stochastic = 0.0;
  double quadratic = 0.0;
  [[nodiscard]] double total() const { return stochastic + quadratic; }
};

ZhatParts zhat_parts(const FieldBundle& fb, double t, const Vec& x, double dt,
                     const Vec& dB);

double zhat_increment(const FieldBundle& fb, double t, const Vec& x, double dt,
                      const Vec& dB);

// Zhat_t = -log dQ_t/dP along one path. Weights are exp(-zhat) and are
// formed on demand.
struct GirsanovSeries {
  std::vector<double> times;
  std::vector<double> zhat;       // zhat[0] = 0
  std::vector<double> quadratic;  // running sum of the dt part, nondecreasing

  [[nodiscard]] double weight(std::size_t n) const;
  [[nodiscard]] std::vector<double> weights() const;
};

// The path must come from the same FieldBundle. Throws SingularMatrix with
// the step index.
GirsanovSeries density_process(const FieldBundle& fb, const PathRecord& path);

struct MartingaleCheck {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  bool pass = false;
};

// Sample mean and standard error of the final weights; passes iff
// |mean - 1| <= 3 stderr. Sums in the given order. Requires >= 100 weights.
MartingaleCheck martingale_check(std::span<const double> final_weights);
MartingaleCheck martingale_check(std::span<const GirsanovSeries> ensemble);

}  // namespace pathind
