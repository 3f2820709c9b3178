#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pathind/error.hpp"
#include "pathind/fields.hpp"
#include "pathind/kpz.hpp"

using namespace pathind;

namespace {

FieldBundle constant_bundle(const Vec& b, const Mat& sigma) {
  FieldBundle fb;
  fb.dimension = b.size();
  fb.drift = [b](double, const Vec&) { return b; };
  fb.sigma = [sigma](double, const Vec&) { return sigma; };
  return fb;
}

FieldBundle sigma_only(const Mat& sigma) { return constant_bundle(Vec(sigma.size()), sigma); }

// Random smooth potential a0 t + <c, x> + x^T Q x / 2 with analytic derivatives.
Potential random_quadratic(std::mt19937_64& rng, int d, double scale) {
  std::uniform_real_distribution<double> u(-1, 1);
  Mat q(d);
  Vec c(d);
  const double a0 = u(rng);
  for (int i = 0; i < d; ++i) {
    c[i] = u(rng);
    for (int j = 0; j <= i; ++j) q(i, j) = q(j, i) = u(rng);
  }
  Potential v(d, [=](double t, const Vec& x) {
    return scale * (a0 * t + dot(c, x) + 0.5 * dot(x, q * x));
  });
  v.with_gradient([=](double, const Vec& x) { return scale * (c + q * x); })
      .with_hessian([=](double, const Vec&) { return scale * q; })
      .with_time_derivative([=](double, const Vec&) { return scale * a0; });
  return v;
}

GridField line(double lo, double hi, int n, double t) {
  return GridField({Axis{lo, hi, n}}, t);
}

}  // namespace

TEST_CASE("kpz_residual examples") {
  const Mat sigma{{1, 0.3}, {0, 0.9}};
  const Potential constant(2, [](double, const Vec&) { return 4.2; });
  CHECK(std::abs(kpz_residual(constant, sigma_only(sigma), 0.3, Vec{1, 2})) < 1e-8);

  const Potential lin = linear_potential(Vec{0.7, -0.4}, sigma);
  CHECK(std::abs(kpz_residual(lin, sigma_only(sigma), 0.3, Vec{1, 2})) <= 1e-8);

  Potential sq(1, [](double, const Vec& x) { return x[0] * x[0]; });
  sq.with_gradient([](double, const Vec& x) { return Vec{2 * x[0]}; })
      .with_hessian([](double, const Vec&) { return Mat{{2.0}}; })
      .with_time_derivative([](double, const Vec&) { return 0.0; });
  CHECK(std::abs(kpz_residual(sq, sigma_only(Mat{{1}}), 0.0, Vec{1.0}) - 3.0) <= 1e-10);
  CHECK(kpz_residual(sq, sigma_only(Mat{{1}}), 0.0, Vec{-2.0}) == doctest::Approx(9.0));
}

TEST_CASE("bridge potential solves the KPZ equation") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int d : {1, 2, 3}) {
    const Scenario s = bridge_scenario(d, 1.3, 2.0);
    for (int i = 0; i < 30; ++i) {
      Vec x(d);
      for (int k = 0; k < d; ++k) x[k] = u(rng);
      const double t = (u(rng) + 3) / 6 * 1.5;
      REQUIRE(std::abs(kpz_residual(*s.potential, s.fields, t, x)) <= 1e-8);
    }
  }
}

TEST_CASE("property: KPZ residual scaling") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 3;
    std::mt19937_64 copy = rng;
    const Potential v1 = random_quadratic(rng, d, 1.0);
    const Potential v2 = random_quadratic(copy, d, 2.0);
    Mat s = Mat::identity(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s(i, j) += 0.2 * u(rng);
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = u(rng);
    const FieldBundle fb = sigma_only(s);
    const Mat a = eval_a(fb, 0.2, x);
    const double lin1 = v1.time_derivative(0.2, x) + 0.5 * trace(a * v1.hessian(0.2, x));
    const Vec g1 = transpose(s) * v1.gradient(0.2, x);
    const double quad1 = 0.5 * dot(g1, g1);
    const double r1 = kpz_residual(v1, fb, 0.2, x);
    const double r2 = kpz_residual(v2, fb, 0.2, x);
    REQUIRE(std::abs(r1 - (lin1 + quad1)) <= 1e-12 * (1 + std::abs(r1)));
    REQUIRE(std::abs(r2 - (2 * lin1 + 4 * quad1)) <= 1e-11 * (1 + std::abs(r2)));
  }
}

TEST_CASE("gradient_form_check examples") {
  const Box box{Vec{-2, -2}, Vec{2, 2}};
  const Mat sigma{{1, 0.3}, {0, 0.9}};
  FieldBundle grad;
  grad.dimension = 2;
  grad.sigma = [sigma](double, const Vec&) { return sigma; };
  grad.drift = drift_from_potential(bridge_potential(2, 1.0, 2.0), grad.sigma);
  const GradientCheck g = gradient_form_check(grad, 0.5, box, 100);
  CHECK(g.pass);
  CHECK(g.max_asymmetry <= 1e-8);

  const GradientCheck r = gradient_form_check(rotational_scenario(1.0).fields, 0.0, box, 100);
  CHECK(!r.pass);
  CHECK(std::abs(r.max_asymmetry - 2.0) <= 1e-4);

  const GradientCheck z = gradient_form_check(sigma_only(sigma), 0.0, box, 100);
  CHECK(z.pass);
  CHECK(z.max_asymmetry == 0.0);
}

TEST_CASE("property: curl test separates gradient and rotational drifts") {
  std::mt19937_64 rng(10);
  const Box box{Vec{-1, -1}, Vec{1, 1}};
  for (int trial = 0; trial < 20; ++trial) {
    FieldBundle fb;
    fb.dimension = 2;
    fb.sigma = [](double, const Vec&) { return Mat{{1.2, 0.1}, {-0.2, 0.8}}; };
    fb.drift = drift_from_potential(random_quadratic(rng, 2, 1.0), fb.sigma);
    REQUIRE(gradient_form_check(fb, 0.1, box, 20, std::nullopt, trial).pass);
  }
  for (double kappa : {0.05, 0.1, 0.5, 1.0, 3.0}) {
    const GradientCheck r =
        gradient_form_check(rotational_scenario(kappa).fields, 0.0, box, 20);
    CHECK(!r.pass);
    CHECK(r.max_asymmetry >= 0.1);
  }
}

TEST_CASE("grid field geometry") {
  const GridField g({Axis{-1, 1, 5}, Axis{0, 2, 3}}, 0.5);
  CHECK(g.size() == 15);
  CHECK(g.point(0) == Vec{-1, 0});
  CHECK(g.point(6) == Vec{-0.5, 1});
  CHECK(g.on_boundary(0));
  CHECK(!g.on_boundary(6));
  CHECK(g.boundary_distance(6) == doctest::Approx(0.5));
}

TEST_CASE("cole_hopf_solve examples") {
  const Mat one{{1.0}};
  GridField zero = line(-5, 5, 201, 0.5);
  zero.sample([](double, const Vec&) { return 0.0; });
  const auto flat = cole_hopf_solve(zero, one);
  REQUIRE(flat.size() == 2);
  CHECK(flat.front().time() == 0.5);
  CHECK(flat.back().time() == 0.0);
  for (double v : flat.back().values()) CHECK(v == 0.0);

  const double width = boundary_layer_width(one, 0.5);
  CHECK(width == doctest::Approx(4 * std::sqrt(0.5)));

  GridField lin = line(-5, 5, 201, 0.5);
  lin.sample([](double t, const Vec& x) { return x[0] - 0.5 * t; });
  const GridField lin0 = cole_hopf_solve(lin, one).back();
  double err = 0;
  for (std::size_t i = 0; i < lin0.size(); ++i)
    if (lin0.boundary_distance(i) > width)
      err = std::max(err, std::abs(lin0.values()[i] - lin0.point(i)[0]));
  CHECK(err <= 1e-3);

  const Potential bridge = bridge_potential(1, 1.0, 2.0);
  GridField term = line(-5, 5, 201, 0.5);
  term.sample([&](double t, const Vec& x) { return bridge.value(t, x); });
  const auto snaps = cole_hopf_solve(term, one, ColeHopfOptions{0, 0, 0.0});
  double berr = 0;
  for (std::size_t i = 0; i < snaps.back().size(); ++i)
    if (snaps.back().boundary_distance(i) > width)
      berr = std::max(berr, std::abs(snaps.back().values()[i] -
                                     bridge.value(0.0, snaps.back().point(i))));
  CHECK(berr <= 1e-3);
}

TEST_CASE("cole_hopf_solve errors") {
  const Mat one{{1.0}};
  GridField g = line(-5, 5, 201, 0.5);
  g.sample([](double, const Vec& x) { return x[0]; });
  try {
    (void)cole_hopf_solve(g, one, ColeHopfOptions{10, 0, 0.0});
    FAIL("expected UnstableParameters");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnstableParameters);
  }
  try {
    (void)cole_hopf_solve(g, one, ColeHopfOptions{0, 0, 0.8});
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
  }
  GridField steep = line(-5, 5, 201, 0.5);
  steep.sample([](double, const Vec& x) { return -1e4 * x[0] * x[0]; });
  try {
    (void)cole_hopf_solve(steep, one);
    FAIL("expected NonPositiveW");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveW);
  }
}

TEST_CASE("property: discrete maximum principle") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng);
    GridField g = line(-4, 4, 81, 0.3);
    g.sample([=](double, const Vec& x) {
      return a * std::sin(b * x[0]) + 0.2 * c * x[0] * x[0] / 3;
    });
    const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
    const double vmin = *lo, vmax = *hi;
    const Mat s{{0.5 + std::abs(u(rng)) / 3}};
    for (const GridField& snap : cole_hopf_solve(g, s, ColeHopfOptions{0, 5, 0.0}))
      for (double v : snap.values()) {
        REQUIRE(v >= vmin - 1e-12);
        REQUIRE(v <= vmax + 1e-12);
      }
  }
}

TEST_CASE("two-dimensional solve with correlated sigma") {
  const Mat sigma{{1, 0.3}, {0, 0.9}};
  const Vec c{0.7, -0.4};
  const Potential lin = linear_potential(c, sigma);
  GridField g({Axis{-4, 4, 41}, Axis{-4, 4, 41}}, 0.25);
  g.sample([&](double t, const Vec& x) { return lin.value(t, x); });
  const auto snaps = cole_hopf_solve(g, sigma, ColeHopfOptions{0, 0, 0.0});
  const GridField& v0 = snaps.back();
  const double width = boundary_layer_width(sigma, 0.25);
  double err = 0;
  for (std::size_t i = 0; i < v0.size(); ++i)
    if (v0.boundary_distance(i) > width)
      err = std::max(err, std::abs(v0.values()[i] - lin.value(0.0, v0.point(i))));
  CHECK(err <= 1e-3);
}

TEST_CASE("grid KPZ residual is small for the bridge solution") {
  const Mat one{{1.0}};
  const Potential bridge = bridge_potential(1, 1.0, 2.0);
  GridField term = line(-5, 5, 201, 0.5);
  term.sample([&](double t, const Vec& x) { return bridge.value(t, x); });
  const auto snaps = cole_hopf_solve(term, one, ColeHopfOptions{0, 1, 0.0});
  REQUIRE(snaps.size() >= 3);
  const std::size_t k = snaps.size() / 2;
  const auto r = grid_kpz_residual(snaps[k + 1], snaps[k], one);
  const double width = boundary_layer_width(one, 0.5);
  for (std::size_t i = 0; i < r.size(); ++i)
    if (snaps[k + 1].boundary_distance(i) > width) REQUIRE(std::abs(r[i]) < 1e-2);
}
