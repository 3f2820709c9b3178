#pragma once

#include <array>
#include <cstdint>

namespace pathind {

// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: the output
// depends only on (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Standard normal variates keyed by (seed, path, step, component). The
// value at a given key never depends on what else has been drawn, so
// ensembles are reproducible under any scheduling.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : seed_(seed) {}

  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  [[nodiscard]] double normal(std::uint64_t path, std::uint64_t step,
                              int component) const;

  // Uniform on (0, 1], 53-bit resolution.
  [[nodiscard]] double uniform(std::uint64_t path, std::uint64_t step,
                               int component) const;

 private:
  std::uint64_t seed_;
};

}  // namespace pathind
