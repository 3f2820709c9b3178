#include "pathind/random.hpp"

#include <cmath>
#include <numbers>

namespace pathind {

namespace {

constexpr std::uint32_t kW0 = 0x9E3779B9;
constexpr std::uint32_t kW1 = 0xBB67AE85;
constexpr std::uint32_t kM0 = 0xD2511F53;
constexpr std::uint32_t kM1 = 0xCD9E8D57;

std::array<std::uint32_t, 4> round_fn(const std::array<std::uint32_t, 4>& c,
                                      const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t path,
                                   std::uint64_t step, int pair) {
  return philox4x32(
      {static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(step),
       static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    counter = round_fn(counter, key);
    key[0] += kW0;
    key[1] += kW1;
  }
  return counter;
}

double GaussianStream::normal(std::uint64_t path, std::uint64_t step,
                              int component) const {
  // Box-Muller: one 128-bit block yields the pair (2j, 2j+1).
  const auto r = block(seed_, path, step, component / 2);
  const double u1 = to_unit(r[0], r[1]);
  const double u2 = to_unit(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return component % 2 == 0 ? radius * std::cos(angle)
                            : radius * std::sin(angle);
}

double GaussianStream::uniform(std::uint64_t path, std::uint64_t step,
                               int component) const {
  const auto r = block(seed_, path, step, component / 2);
  return component % 2 == 0 ? to_unit(r[0], r[1]) : to_unit(r[2], r[3]);
}

}  // namespace pathind
