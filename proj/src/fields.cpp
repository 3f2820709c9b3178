#include "pathind/fields.hpp"

#include <cmath>
#include <numbers>

#include "pathind/error.hpp"

namespace pathind {

Potential::Potential(int dimension, ScalarField value)
    : dimension_(dimension), value_(std::move(value)) {}

Potential& Potential::with_gradient(VectorField gradient) {
  gradient_ = std::move(gradient);
  return *this;
}

Potential& Potential::with_hessian(MatrixField hessian) {
  hessian_ = std::move(hessian);
  return *this;
}

Potential& Potential::with_time_derivative(ScalarField dt) {
  dt_ = std::move(dt);
  return *this;
}

double Potential::value(double t, const Vec& x) const { return value_(t, x); }

Vec Potential::gradient(double t, const Vec& x) const {
  return gradient_ ? gradient_(t, x) : fd_gradient_at(t, x);
}

Mat Potential::hessian(double t, const Vec& x) const {
  return hessian_ ? hessian_(t, x) : fd_hessian_at(t, x);
}

double Potential::time_derivative(double t, const Vec& x) const {
  return dt_ ? dt_(t, x) : fd_time_derivative_at(t, x);
}

Vec Potential::fd_gradient_at(double t, const Vec& x) const {
  return fd_gradient(value_, t, x);
}

Mat Potential::fd_hessian_at(double t, const Vec& x) const {
  return fd_hessian(value_, t, x);
}

double Potential::fd_time_derivative_at(double t, const Vec& x) const {
  return fd_time_derivative(value_, t, x);
}

Mat eval_a(const FieldBundle& fb, double t, const Vec& x) {
  const Mat s = fb.sigma(t, x);
  const int n = s.size();
  Mat a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double sum = 0.0;
      for (int k = 0; k < n; ++k) sum += s(i, k) * s(j, k);
      a(i, j) = sum;
      a(j, i) = sum;
    }
  }
  return a;
}

VectorField drift_from_potential(const Potential& v, MatrixField sigma) {
  return [v, sigma = std::move(sigma)](double t, const Vec& x) {
    FieldBundle fb;
    fb.dimension = x.size();
    fb.sigma = sigma;
    return eval_a(fb, t, x) * v.gradient(t, x);
  };
}

VectorField gamma_field(const FieldBundle& fb) {
  return [fb](double t, const Vec& x) {
    return -1.0 * solve(fb.sigma(t, x), fb.drift(t, x));
  };
}

namespace {

// Returns the worst normalized deviation and records failures.
double compare(double analytic, double fd, const std::string& what,
               const SamplePoint& p, SelfCheckReport& report) {
  const double dev = std::abs(analytic - fd);
  if (dev > 1e-4 * (1.0 + std::abs(analytic))) {
    report.pass = false;
    report.failures.push_back(what + " at t=" + std::to_string(p.t) +
                              ": deviation " + std::to_string(dev));
  }
  return dev;
}

}  // namespace

SelfCheckReport potential_self_check(const Potential& v,
                                     std::span<const SamplePoint> samples) {
  SelfCheckReport report;
  for (const auto& p : samples) {
    if (v.has_analytic_gradient()) {
      report.compared = true;
      const Vec a = v.gradient(p.t, p.x);
      const Vec f = v.fd_gradient_at(p.t, p.x);
      for (int i = 0; i < a.size(); ++i) {
        report.gradient_deviation =
            std::max(report.gradient_deviation,
                     compare(a[i], f[i], "gradient", p, report));
      }
    }
    if (v.has_analytic_hessian()) {
      report.compared = true;
      const Mat a = v.hessian(p.t, p.x);
      const Mat f = v.fd_hessian_at(p.t, p.x);
      for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j)
          report.hessian_deviation =
              std::max(report.hessian_deviation,
                       compare(a(i, j), f(i, j), "hessian", p, report));
    }
    if (v.has_analytic_time_derivative()) {
      report.compared = true;
      report.time_deviation = std::max(
          report.time_deviation,
          compare(v.time_derivative(p.t, p.x), v.fd_time_derivative_at(p.t, p.x),
                  "time derivative", p, report));
    }
  }
  return report;
}

Potential linear_potential(const Vec& c, const Mat& sigma) {
  const Vec sc = transpose(sigma) * c;
  const double rate = 0.5 * dot(sc, sc);
  Potential v(c.size(),
              [c, rate](double t, const Vec& x) { return dot(c, x) - rate * t; });
  const int d = c.size();
  v.with_gradient([c](double, const Vec&) { return c; })
      .with_hessian([d](double, const Vec&) { return Mat(d); })
      .with_time_derivative([rate](double, const Vec&) { return -rate; });
  return v;
}

Scenario linear_scenario(const Vec& c, const Mat& sigma) {
  Scenario s;
  s.name = "linear";
  s.potential = linear_potential(c, sigma);
  s.fields.dimension = c.size();
  s.fields.sigma = [sigma](double, const Vec&) { return sigma; };
  s.fields.drift = drift_from_potential(*s.potential, s.fields.sigma);
  s.constant_sigma = sigma;
  return s;
}

Potential bridge_potential(int dimension, double sigma0, double t0) {
  const double s2 = sigma0 * sigma0;
  const double d = dimension;
  Potential v(dimension, [=](double t, const Vec& x) {
    const double tau = t0 - t;
    return -dot(x, x) / (2.0 * s2 * tau) -
           0.5 * d * std::log(2.0 * std::numbers::pi * s2 * tau);
  });
  v.with_gradient([=](double t, const Vec& x) {
     return (-1.0 / (s2 * (t0 - t))) * x;
   })
      .with_hessian([=](double t, const Vec&) {
        return (-1.0 / (s2 * (t0 - t))) * Mat::identity(dimension);
      })
      .with_time_derivative([=](double t, const Vec& x) {
        const double tau = t0 - t;
        return -dot(x, x) / (2.0 * s2 * tau * tau) + 0.5 * d / tau;
      });
  return v;
}

Scenario bridge_scenario(int dimension, double sigma0, double t0) {
  Scenario s;
  s.name = "bridge";
  s.potential = bridge_potential(dimension, sigma0, t0);
  const Mat sigma = sigma0 * Mat::identity(dimension);
  s.fields.dimension = dimension;
  s.fields.sigma = [sigma](double, const Vec&) { return sigma; };
  s.fields.drift = drift_from_potential(*s.potential, s.fields.sigma);
  s.constant_sigma = sigma;
  return s;
}

Scenario rotational_scenario(double kappa) {
  Scenario s;
  s.name = "rotational";
  s.fields.dimension = 2;
  s.fields.drift = [kappa](double, const Vec& x) {
    return Vec{-kappa * x[1], kappa * x[0]};
  };
  s.fields.sigma = [](double, const Vec&) { return Mat::identity(2); };
  s.constant_sigma = Mat::identity(2);
  Potential zero(2, [](double, const Vec&) { return 0.0; });
  zero.with_gradient([](double, const Vec&) { return Vec(2); })
      .with_hessian([](double, const Vec&) { return Mat(2); })
      .with_time_derivative([](double, const Vec&) { return 0.0; });
  s.potential = zero;
  return s;
}

Scenario ou1d_scenario(double theta, double sigma0) {
  Scenario s;
  s.name = "ou1d";
  const double s2 = sigma0 * sigma0;
  Potential v(1, [=](double, const Vec& x) {
    return -theta * x[0] * x[0] / (2.0 * s2);
  });
  v.with_gradient([=](double, const Vec& x) { return Vec{-theta * x[0] / s2}; })
      .with_hessian([=](double, const Vec&) { return Mat{{-theta / s2}}; })
      .with_time_derivative([](double, const Vec&) { return 0.0; });
  s.potential = v;
  s.fields.dimension = 1;
  s.fields.drift = [theta](double, const Vec& x) { return Vec{-theta * x[0]}; };
  s.fields.sigma = [sigma0](double, const Vec&) { return Mat{{sigma0}}; };
  s.constant_sigma = Mat{{sigma0}};
  return s;
}

Scenario porous1d_scenario(double m, double c) {
  if (!(c > 0.0) || !(m >= 1.0)) {
    throw Error(ErrorKind::ConfigError,
                "porous1d requires m >= 1 and c > 0");
  }
  const double sigma0 = std::sqrt(m) * std::pow(c, 0.5 * (m - 1.0));
  Scenario s = linear_scenario(Vec{c}, Mat{{sigma0}});
  s.name = "porous1d";
  return s;
}

}  // namespace pathind
