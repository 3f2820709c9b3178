#include "pathind/sde.hpp"

#include <cmath>

#include "pathind/error.hpp"

namespace pathind {

TimeGrid::TimeGrid(double horizon, int steps)
    : horizon_(horizon), steps_(steps), dt_(horizon / steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon) || steps < 1) {
    throw Error(ErrorKind::ConfigError,
                "time grid needs T > 0 and at least one step");
  }
}

Vec em_step(const FieldBundle& fb, double t, const Vec& x, double dt,
            const Vec& dB) {
  const Vec next = x + dt * fb.drift(t, x) + fb.sigma(t, x) * dB;
  if (!next.all_finite()) {
    throw Error(ErrorKind::NonFiniteState,
                "non-finite state at t=" + std::to_string(t));
  }
  return next;
}

Vec brownian_increment(const GaussianStream& stream, const TimeGrid& grid,
                       std::uint64_t path_id, int step, int dimension,
                       int substeps) {
  const double scale = std::sqrt(
      grid.horizon() / (static_cast<double>(grid.steps()) * substeps));
  Vec dB(dimension);
  for (int k = 0; k < dimension; ++k) {
    double sum = 0.0;
    for (int j = 0; j < substeps; ++j) {
      const auto fine = static_cast<std::uint64_t>(step) * substeps + j;
      sum += scale * stream.normal(path_id, fine, k);
    }
    dB[k] = sum;
  }
  return dB;
}

PathRecord simulate_path(const FieldBundle& fb, const Vec& x0,
                         const TimeGrid& grid, const GaussianStream& stream,
                         std::uint64_t path_id, int substeps) {
  if (x0.size() != fb.dimension) {
    throw Error(ErrorKind::DimensionMismatch,
                "x0 has " + std::to_string(x0.size()) +
                    " components, fields have " + std::to_string(fb.dimension));
  }
  PathRecord rec{grid, path_id, {}, {}};
  rec.states.reserve(grid.steps() + 1);
  rec.increments.reserve(grid.steps());
  rec.states.push_back(x0);
  for (int n = 0; n < grid.steps(); ++n) {
    const Vec dB =
        brownian_increment(stream, grid, path_id, n, fb.dimension, substeps);
    try {
      rec.states.push_back(
          em_step(fb, grid.time(n), rec.states.back(), grid.dt(), dB));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFiniteState) throw;
      throw Error(ErrorKind::NonFiniteState,
                  "path " + std::to_string(path_id) + " blew up at step " +
                      std::to_string(n));
    }
    rec.increments.push_back(dB);
  }
  return rec;
}

Ensemble simulate_ensemble(const FieldBundle& fb, const Vec& x0,
                           const TimeGrid& grid, std::uint64_t seed,
                           std::size_t n_paths, int threads) {
  const GaussianStream stream(seed);
  auto outcomes = map_paths(fb, x0, grid, stream, n_paths, threads,
                            [](const PathRecord& r) { return r; });
  Ensemble ens;
  for (auto& o : outcomes) {
    if (o.value) ens.paths.push_back(std::move(*o.value));
    if (o.failure) ens.failures.push_back(std::move(*o.failure));
  }
  return ens;
}

}  // namespace pathind
