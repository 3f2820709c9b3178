#include "pathind/girsanov.hpp"

#include <cmath>

#include "pathind/error.hpp"

namespace pathind {

ZhatParts zhat_parts(const FieldBundle& fb, double t, const Vec& x, double dt,
                     const Vec& dB) {
  const Vec g = solve(fb.sigma(t, x), fb.drift(t, x));
  return {dot(g, dB), 0.5 * dot(g, g) * dt};
}

double zhat_increment(const FieldBundle& fb, double t, const Vec& x, double dt,
                      const Vec& dB) {
  return zhat_parts(fb, t, x, dt, dB).total();
}

double GirsanovSeries::weight(std::size_t n) const {
  return std::exp(-zhat[n]);
}

std::vector<double> GirsanovSeries::weights() const {
  std::vector<double> w(zhat.size());
  for (std::size_t n = 0; n < zhat.size(); ++n) w[n] = std::exp(-zhat[n]);
  return w;
}

GirsanovSeries density_process(const FieldBundle& fb, const PathRecord& path) {
  const int steps = path.grid.steps();
  GirsanovSeries s;
  s.times.resize(steps + 1);
  s.zhat.resize(steps + 1);
  s.quadratic.resize(steps + 1);
  s.times[0] = 0.0;
  for (int n = 0; n < steps; ++n) {
    const double t = path.grid.time(n);
    ZhatParts inc;
    try {
      inc = zhat_parts(fb, t, path.states[n], path.grid.dt(),
                       path.increments[n]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularMatrix) throw;
      throw Error(ErrorKind::SingularMatrix,
                  "sigma singular at step " + std::to_string(n) + ": " +
                      e.what());
    }
    s.times[n + 1] = path.grid.time(n + 1);
    s.zhat[n + 1] = s.zhat[n] + inc.total();
    s.quadratic[n + 1] = s.quadratic[n] + inc.quadratic;
  }
  return s;
}

MartingaleCheck martingale_check(std::span<const double> final_weights) {
  const std::size_t n = final_weights.size();
  if (n < 100) {
    throw Error(ErrorKind::ConfigError,
                "martingale check needs at least 100 paths, got " +
                    std::to_string(n));
  }
  double sum = 0.0;
  for (double w : final_weights) sum += w;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double w : final_weights) ss += (w - mean) * (w - mean);
  const double var = ss / static_cast<double>(n - 1);
  MartingaleCheck r;
  r.n = n;
  r.mean = mean;
  r.std_error = std::sqrt(var / static_cast<double>(n));
  r.pass = std::abs(mean - 1.0) <= 3.0 * r.std_error;
  return r;
}

MartingaleCheck martingale_check(std::span<const GirsanovSeries> ensemble) {
  std::vector<double> w;
  w.reserve(ensemble.size());
  for (const auto& s : ensemble) w.push_back(s.weight(s.zhat.size() - 1));
  return martingale_check(w);
}

}  // namespace pathind
