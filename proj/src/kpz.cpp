#include "pathind/kpz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathind/error.hpp"
#include "pathind/random.hpp"

namespace pathind {

double kpz_residual(const Potential& v, const FieldBundle& fb, double t,
                    const Vec& x) {
  const Mat a = eval_a(fb, t, x);
  const Vec grad = v.gradient(t, x);
  const Mat hess = v.hessian(t, x);
  const Vec st_grad = transpose(fb.sigma(t, x)) * grad;
  return v.time_derivative(t, x) +
         0.5 * (trace(a * hess) + dot(st_grad, st_grad));
}

GradientCheck gradient_form_check(const FieldBundle& fb, double t,
                                  const Box& region, int n_samples,
                                  std::optional<double> tolerance,
                                  std::uint64_t seed) {
  const int d = fb.dimension;
  if (region.lower.size() != d || region.upper.size() != d) {
    throw Error(ErrorKind::DimensionMismatch, "region dimension mismatch");
  }
  for (int k = 0; k < d; ++k) {
    if (!(region.upper[k] > region.lower[k])) {
      throw Error(ErrorKind::ConfigError, "degenerate region on axis " +
                                              std::to_string(k + 1));
    }
  }
  if (n_samples < 1) {
    throw Error(ErrorKind::ConfigError, "gradient check needs samples >= 1");
  }

  GradientCheck out;
  out.tolerance = tolerance.value_or(fb.drift_uses_fd ? 1e-4 : 1e-8);
  out.samples = n_samples;
  out.worst_point = region.lower;

  auto field = [&](const Vec& x) { return solve(eval_a(fb, t, x), fb.drift(t, x)); };

  const GaussianStream stream(seed);
  for (int s = 0; s < n_samples; ++s) {
    Vec x(d);
    for (int k = 0; k < d; ++k) {
      const double u = stream.uniform(static_cast<std::uint64_t>(s), 0, k);
      x[k] = region.lower[k] + u * (region.upper[k] - region.lower[k]);
    }
    const double h = 1e-5 * std::max(1.0, x.norm_inf());
    // jac(i, j) = dF_i / dx_j
    Mat jac(d);
    for (int j = 0; j < d; ++j) {
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vec fp = field(xp);
      const Vec fm = field(xm);
      for (int i = 0; i < d; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const double asym = std::abs(jac(i, j) - jac(j, i));
        if (asym > out.max_asymmetry) {
          out.max_asymmetry = asym;
          out.worst_point = x;
        }
      }
    }
  }
  out.pass = out.max_asymmetry <= out.tolerance;
  return out;
}

GridField::GridField(std::vector<Axis> axes, double time)
    : axes_(std::move(axes)), time_(time) {
  if (axes_.empty() || axes_.size() > 2) {
    throw Error(ErrorKind::ConfigError, "grid dimension must be 1 or 2");
  }
  std::size_t n = 1;
  for (const auto& a : axes_) {
    if (a.points < 3 || !(a.upper > a.lower)) {
      throw Error(ErrorKind::ConfigError,
                  "grid axes need at least 3 points and upper > lower");
    }
    n *= static_cast<std::size_t>(a.points);
  }
  values_.assign(n, 0.0);
}

Vec GridField::point(std::size_t flat) const {
  Vec x(dimension());
  const auto n0 = static_cast<std::size_t>(axes_[0].points);
  x[0] = axes_[0].coord(static_cast<int>(flat % n0));
  if (dimension() == 2) x[1] = axes_[1].coord(static_cast<int>(flat / n0));
  return x;
}

double GridField::boundary_distance(std::size_t flat) const {
  const Vec x = point(flat);
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dimension(); ++k) {
    d = std::min({d, x[k] - axes_[k].lower, axes_[k].upper - x[k]});
  }
  return d;
}

bool GridField::on_boundary(std::size_t flat) const {
  const auto n0 = static_cast<std::size_t>(axes_[0].points);
  const auto i = flat % n0;
  if (i == 0 || i + 1 == n0) return true;
  if (dimension() == 2) {
    const auto j = flat / n0;
    if (j == 0 || j + 1 == static_cast<std::size_t>(axes_[1].points))
      return true;
  }
  return false;
}

void GridField::sample(const ScalarField& f) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] = f(time_, point(i));
  }
}

namespace {

int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

double max_diag(const Mat& a) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, a(i, i));
  return m;
}

// One explicit step of dw/ds = Tr(a Hess w)/2 with ghost-node reflection.
void heat_step(const std::vector<Axis>& axes, const Mat& a, double ds,
               const std::vector<double>& w, std::vector<double>& out) {
  const int nx = axes[0].points;
  const double dx = axes[0].spacing();
  if (axes.size() == 1) {
    const double r = 0.5 * a(0, 0) * ds / (dx * dx);
    for (int i = 0; i < nx; ++i) {
      const double c = w[i];
      const double l = w[reflect(i - 1, nx)];
      const double rr = w[reflect(i + 1, nx)];
      out[i] = c + r * ((l - c) + (rr - c));
    }
    return;
  }
  const int ny = axes[1].points;
  const double dy = axes[1].spacing();
  const double rx = 0.5 * a(0, 0) * ds / (dx * dx);
  const double ry = 0.5 * a(1, 1) * ds / (dy * dy);
  const double rxy = 0.5 * 2.0 * a(0, 1) * ds / (4.0 * dx * dy);
  auto at = [&](int i, int j) {
    return w[static_cast<std::size_t>(reflect(j, ny)) * nx + reflect(i, nx)];
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = at(i, j);
      double delta = rx * ((at(i - 1, j) - c) + (at(i + 1, j) - c)) +
                     ry * ((at(i, j - 1) - c) + (at(i, j + 1) - c));
      if (rxy != 0.0) {
        delta += rxy * (at(i + 1, j + 1) - at(i + 1, j - 1) -
                        at(i - 1, j + 1) + at(i - 1, j - 1));
      }
      out[static_cast<std::size_t>(j) * nx + i] = c + delta;
    }
  }
}

}  // namespace

double boundary_layer_width(const Mat& sigma, double horizon) {
  return 4.0 * std::sqrt(max_diag(sigma * transpose(sigma)) * horizon);
}

std::vector<GridField> cole_hopf_solve(const GridField& terminal,
                                       const Mat& sigma,
                                       const ColeHopfOptions& options) {
  const int d = terminal.dimension();
  if (sigma.size() != d) {
    throw Error(ErrorKind::DimensionMismatch,
                "sigma is " + std::to_string(sigma.size()) + "x" +
                    std::to_string(sigma.size()) + " but the grid has dimension " +
                    std::to_string(d));
  }
  const double t_start = terminal.time();
  const double span = t_start - options.t_end;
  if (!(span > 0.0)) {
    throw Error(ErrorKind::ConfigError,
                "the KPZ equation is solved backwards from terminal data; "
                "t_end must lie before the terminal time");
  }
  const Mat a = sigma * transpose(sigma);
  double min_dx2 = std::numeric_limits<double>::infinity();
  for (const auto& ax : terminal.axes())
    min_dx2 = std::min(min_dx2, ax.spacing() * ax.spacing());
  const double bound = 0.25 * min_dx2 / max_diag(a);

  int steps = options.steps;
  if (steps <= 0) {
    steps = static_cast<int>(std::ceil(span / bound));
    while (span / steps > bound) ++steps;
  } else if (span / steps > bound) {
    throw Error(ErrorKind::UnstableParameters,
                "step " + std::to_string(span / steps) +
                    " exceeds the explicit stability bound " +
                    std::to_string(bound));
  }
  const double ds = span / steps;
  const int every = options.output_every > 0 ? options.output_every : steps;

  double vmax = -std::numeric_limits<double>::infinity();
  for (double v : terminal.values()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFiniteValue, "terminal data not finite");
    }
    vmax = std::max(vmax, v);
  }
  std::vector<double> w(terminal.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(terminal.values()[i] - vmax);
    if (!(w[i] > 0.0)) {
      throw Error(ErrorKind::NonPositiveW,
                  "exp(v - max v) underflows at node " + std::to_string(i));
    }
  }

  auto snapshot = [&](double t) {
    GridField g(terminal.axes(), t);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!(w[i] > 0.0)) {
        throw Error(ErrorKind::NonPositiveW,
                    "w reached zero at node " + std::to_string(i));
      }
      g.values()[i] = std::log(w[i]) + vmax;
    }
    return g;
  };

  std::vector<GridField> out;
  out.push_back(terminal);
  std::vector<double> next(w.size());
  for (int k = 1; k <= steps; ++k) {
    heat_step(terminal.axes(), a, ds, w, next);
    w.swap(next);
    if (k % every == 0 || k == steps) {
      out.push_back(snapshot(k == steps ? options.t_end : t_start - k * ds));
    }
  }
  return out;
}

std::vector<double> grid_kpz_residual(const GridField& earlier,
                                      const GridField& later, const Mat& sigma) {
  const double dt = later.time() - earlier.time();
  if (!(dt > 0.0) || earlier.size() != later.size()) {
    throw Error(ErrorKind::ConfigError,
                "residual needs two snapshots of one grid with increasing time");
  }
  const Mat a = sigma * transpose(sigma);
  const auto& axes = earlier.axes();
  const auto& v = earlier.values();
  const int nx = axes[0].points;
  const double dx = axes[0].spacing();
  std::vector<double> res(earlier.size(), 0.0);
  for (std::size_t f = 0; f < earlier.size(); ++f) {
    if (earlier.on_boundary(f)) continue;
    const double vt = (later.values()[f] - v[f]) / dt;
    double tr = 0.0;
    double quad = 0.0;
    if (earlier.dimension() == 1) {
      const double vx = (v[f + 1] - v[f - 1]) / (2.0 * dx);
      const double vxx = (v[f + 1] - 2.0 * v[f] + v[f - 1]) / (dx * dx);
      tr = a(0, 0) * vxx;
      quad = a(0, 0) * vx * vx;
    } else {
      const double dy = axes[1].spacing();
      const std::size_t sx = 1;
      const auto sy = static_cast<std::size_t>(nx);
      const double vx = (v[f + sx] - v[f - sx]) / (2.0 * dx);
      const double vy = (v[f + sy] - v[f - sy]) / (2.0 * dy);
      const double vxx = (v[f + sx] - 2.0 * v[f] + v[f - sx]) / (dx * dx);
      const double vyy = (v[f + sy] - 2.0 * v[f] + v[f - sy]) / (dy * dy);
      const double vxy = (v[f + sx + sy] - v[f + sx - sy] - v[f - sx + sy] +
                          v[f - sx - sy]) /
                         (4.0 * dx * dy);
      tr = a(0, 0) * vxx + 2.0 * a(0, 1) * vxy + a(1, 1) * vyy;
      quad = a(0, 0) * vx * vx + 2.0 * a(0, 1) * vx * vy + a(1, 1) * vy * vy;
    }
    res[f] = vt + 0.5 * (tr + quad);
  }
  return res;
}

}  // namespace pathind
