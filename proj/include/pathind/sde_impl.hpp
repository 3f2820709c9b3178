#pragma once

#include "pathind/error.hpp"

namespace pathind {

template <class Fn>
auto map_paths(const FieldBundle& fb, const Vec& x0, const TimeGrid& grid,
               const GaussianStream& stream, std::size_t n_paths, int threads,
               Fn&& fn, int substeps)
    -> std::vector<PathOutcome<decltype(fn(std::declval<const PathRecord&>()))>> {
  using R = decltype(fn(std::declval<const PathRecord&>()));
  std::vector<PathOutcome<R>> out(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t p) {
    const auto id = static_cast<std::uint64_t>(p);
    try {
      const PathRecord rec = simulate_path(fb, x0, grid, stream, id, substeps);
      out[p].value = fn(rec);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFiniteState) throw;
      out[p].failure = PathFailure{id, e.what()};
    }
  });
  return out;
}

}  // namespace pathind
