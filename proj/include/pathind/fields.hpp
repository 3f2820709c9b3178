#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathind/numerics.hpp"

namespace pathind {

using VectorField = std::function<Vec(double t, const Vec& x)>;
using MatrixField = std::function<Mat(double t, const Vec& x)>;

// Coefficients of dX = b(t,X) dt + sigma(t,X) dB. Invertibility of sigma is
// only checked where it is evaluated.
struct FieldBundle {
  int dimension = 1;
  VectorField drift;
  MatrixField sigma;
  // Set when the drift itself comes from finite differences, which loosens
  // the default tolerance of the curl test.
  bool drift_uses_fd = false;
};

// Scalar potential v(t,x). Derivatives fall back to finite differences when
// no analytic form is attached.
class Potential {
 public:
  Potential(int dimension, ScalarField value);

  Potential& with_gradient(VectorField gradient);
  Potential& with_hessian(MatrixField hessian);
  Potential& with_time_derivative(ScalarField dt);

  [[nodiscard]] int dimension() const { return dimension_; }
  [[nodiscard]] double value(double t, const Vec& x) const;
  [[nodiscard]] Vec gradient(double t, const Vec& x) const;
  [[nodiscard]] Mat hessian(double t, const Vec& x) const;
  [[nodiscard]] double time_derivative(double t, const Vec& x) const;

  [[nodiscard]] Vec fd_gradient_at(double t, const Vec& x) const;
  [[nodiscard]] Mat fd_hessian_at(double t, const Vec& x) const;
  [[nodiscard]] double fd_time_derivative_at(double t, const Vec& x) const;

  [[nodiscard]] bool has_analytic_gradient() const {
    return static_cast<bool>(gradient_);
  }
  [[nodiscard]] bool has_analytic_hessian() const {
    return static_cast<bool>(hessian_);
  }
  [[nodiscard]] bool has_analytic_time_derivative() const {
    return static_cast<bool>(dt_);
  }

 private:
  int dimension_;
  ScalarField value_;
  VectorField gradient_;
  MatrixField hessian_;
  ScalarField dt_;
};

// a = sigma sigma^T, exactly symmetric.
Mat eval_a(const FieldBundle& fb, double t, const Vec& x);

// b = sigma sigma^T grad v.
VectorField drift_from_potential(const Potential& v, MatrixField sigma);

// gamma = -sigma^{-1} b.
VectorField gamma_field(const FieldBundle& fb);

struct SamplePoint {
  double t;
  Vec x;
};

struct SelfCheckReport {
  double gradient_deviation = 0.0;
  double hessian_deviation = 0.0;
  double time_deviation = 0.0;
  bool compared = false;  // false when nothing analytic was attached
  bool pass = true;
  std::vector<std::string> failures;
};

// Compares analytic derivatives against finite differences; an entry
// passes when |analytic - fd| <= 1e-4 * (1 + |analytic|).
SelfCheckReport potential_self_check(const Potential& v,
                                     std::span<const SamplePoint> samples);

// Closed-form test problems. `potential` is the candidate v handed to the
// verifier; for the negative controls it is deliberately not a solution.
struct Scenario {
  std::string name;
  FieldBundle fields;
  std::optional<Potential> potential;
  std::optional<Mat> constant_sigma;
};

// v = <c,x> - |sigma^T c|^2 t / 2 with constant sigma.
Potential linear_potential(const Vec& c, const Mat& sigma);
Scenario linear_scenario(const Vec& c, const Mat& sigma);

// v = -|x|^2 / (2 s0^2 (T0 - t)) - (d/2) log(2 pi s0^2 (T0 - t)), valid for
// t < T0. The resulting drift is the Brownian bridge towards 0 at T0.
Potential bridge_potential(int dimension, double sigma0, double t0);
Scenario bridge_scenario(int dimension, double sigma0, double t0);

// b = kappa (-x2, x1), sigma = I, candidate v = 0. Not gradient-form.
Scenario rotational_scenario(double kappa);

// b = -theta x, sigma = s0, candidate v = -theta x^2 / (2 s0^2). The drift is
// a gradient but v does not solve the KPZ equation.
Scenario ou1d_scenario(double theta, double sigma0);

// Porous-media structure Phi(r) = m r^m with the constant solution u = c:
// b = m c^m, sigma = sqrt(m) c^((m-1)/2), v = c x - sigma^2 c^2 t / 2.
Scenario porous1d_scenario(double m, double c);

}  // namespace pathind
