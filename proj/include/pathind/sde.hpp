#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathind/fields.hpp"
#include "pathind/numerics.hpp"
#include "pathind/parallel.hpp"
#include "pathind/random.hpp"

namespace pathind {

// Uniform grid on [0, T]; t_n is computed as n * dt, never accumulated.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] int steps() const { return steps_; }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] double time(int n) const { return n * dt_; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  int steps_;
  double dt_;
};

struct PathRecord {
  TimeGrid grid;
  std::uint64_t path_id = 0;
  std::vector<Vec> states;      // N + 1 entries, states[0] = x0
  std::vector<Vec> increments;  // N entries, the dB actually used

  friend bool operator==(const PathRecord&, const PathRecord&) = default;
};

// x + b(t,x) dt + sigma(t,x) dB. Throws NonFiniteState on blow-up.
Vec em_step(const FieldBundle& fb, double t, const Vec& x, double dt,
            const Vec& dB);

// The Brownian increment of step n on `grid` for the given path. With
// substeps > 1 it is the sum of the increments of the grid refined by that
// factor, which couples nested grids driven by the same stream.
Vec brownian_increment(const GaussianStream& stream, const TimeGrid& grid,
                       std::uint64_t path_id, int step, int dimension,
                       int substeps = 1);

// Throws NonFiniteState naming the step index.
PathRecord simulate_path(const FieldBundle& fb, const Vec& x0,
                         const TimeGrid& grid, const GaussianStream& stream,
                         std::uint64_t path_id, int substeps = 1);

struct PathFailure {
  std::uint64_t path_id = 0;
  std::string message;
};

template <class R>
struct PathOutcome {
  std::optional<R> value;
  std::optional<PathFailure> failure;
};

// Simulates paths 0..n_paths-1 and maps each record through fn without
// keeping the record. Outcomes are indexed by path id. Numerical blow-ups
// (NonFiniteState) become failures; any other error propagates.
template <class Fn>
auto map_paths(const FieldBundle& fb, const Vec& x0, const TimeGrid& grid,
               const GaussianStream& stream, std::size_t n_paths, int threads,
               Fn&& fn, int substeps = 1)
    -> std::vector<PathOutcome<decltype(fn(std::declval<const PathRecord&>()))>>;

struct Ensemble {
  std::vector<PathRecord> paths;  // ascending path id, failures removed
  std::vector<PathFailure> failures;
};

Ensemble simulate_ensemble(const FieldBundle& fb, const Vec& x0,
                           const TimeGrid& grid, std::uint64_t seed,
                           std::size_t n_paths, int threads = 1);

}  // namespace pathind

#include "pathind/sde_impl.hpp"
