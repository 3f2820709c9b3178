#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pathind/error.hpp"
#include "pathind/fields.hpp"

using namespace pathind;

namespace {

FieldBundle constant_bundle(const Vec& b, const Mat& sigma) {
  FieldBundle fb;
  fb.dimension = b.size();
  fb.drift = [b](double, const Vec&) { return b; };
  fb.sigma = [sigma](double, const Vec&) { return sigma; };
  return fb;
}

Potential linear_no_derivatives(const Vec& c) {
  return Potential(c.size(), [c](double, const Vec& x) { return dot(c, x); });
}

Mat rotation(double angle) {
  return Mat{{std::cos(angle), -std::sin(angle)},
             {std::sin(angle), std::cos(angle)}};
}

}  // namespace

TEST_CASE("eval_a examples") {
  const Vec x{0, 0};
  CHECK(eval_a(constant_bundle(Vec{0, 0}, Mat::identity(2)), 0, x) ==
        Mat::identity(2));
  CHECK(eval_a(constant_bundle(Vec{0, 0}, Mat{{1, 0}, {0, 2}}), 0, x) ==
        Mat{{1, 0}, {0, 4}});
  const Mat a = eval_a(constant_bundle(Vec{0, 0}, Mat{{1, 0.3}, {0, 0.9}}), 0, x);
  CHECK(a(0, 0) == doctest::Approx(1.09).epsilon(1e-15));
  CHECK(a(0, 1) == doctest::Approx(0.27).epsilon(1e-15));
  CHECK(a(1, 0) == doctest::Approx(0.27).epsilon(1e-15));
  CHECK(a(1, 1) == doctest::Approx(0.81).epsilon(1e-15));
}

TEST_CASE("eval_a is exactly symmetric") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % kMaxDim;
    Mat s(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s(i, j) = u(rng);
    const Mat a = eval_a(constant_bundle(Vec(d), s), 0, Vec(d));
    REQUIRE(a == transpose(a));
  }
}

TEST_CASE("drift_from_potential examples") {
  const Vec x{0.4, -1.3};
  const Potential zero(2, [](double, const Vec&) { return 0.0; });
  CHECK(drift_from_potential(zero, [](double, const Vec&) {
          return Mat::identity(2);
        })(0, x).norm_inf() < 1e-9);

  const Potential v = linear_potential(Vec{1, 1}, Mat::identity(2));
  const Vec b1 = drift_from_potential(v, [](double, const Vec&) {
    return Mat::identity(2);
  })(0, x);
  CHECK(b1 == Vec{1, 1});
  const Vec b2 = drift_from_potential(v, [](double, const Vec&) {
    return Mat{{1, 0}, {0, 2}};
  })(0, x);
  CHECK(b2 == Vec{1, 4});
}

TEST_CASE("gamma_field examples") {
  const Vec x{1, 1};
  CHECK(gamma_field(constant_bundle(Vec{0, 0}, Mat::identity(2)))(0, x) ==
        Vec{0, 0});
  CHECK(gamma_field(constant_bundle(Vec{2, 0}, Mat::identity(2)))(0, x) ==
        Vec{-2, 0});
  const Vec g = gamma_field(constant_bundle(Vec{2, 4}, Mat{{2, 0}, {0, 2}}))(0, x);
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(-2.0));
  try {
    (void)gamma_field(constant_bundle(Vec{1, 1}, Mat{{1, 1}, {1, 1}}))(0, x);
    FAIL("expected SingularMatrix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMatrix);
  }
}

TEST_CASE("potential_self_check examples") {
  const std::vector<SamplePoint> samples = {
      {0.0, Vec{0, 0}}, {0.3, Vec{1, -2}}, {0.9, Vec{-3, 0.5}}};

  const SelfCheckReport good =
      potential_self_check(linear_potential(Vec{0.7, -0.4}, Mat::identity(2)), samples);
  CHECK(good.compared);
  CHECK(good.pass);
  CHECK(good.gradient_deviation <= 1e-6);

  const Vec c{0.7, -0.4};
  Potential wrong = linear_no_derivatives(c);
  wrong.with_gradient([c](double, const Vec&) { return c + Vec{1, 0}; });
  const SelfCheckReport bad = potential_self_check(wrong, samples);
  CHECK(!bad.pass);
  CHECK(bad.gradient_deviation == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(!bad.failures.empty());

  const SelfCheckReport vacuous =
      potential_self_check(linear_no_derivatives(c), samples);
  CHECK(!vacuous.compared);
  CHECK(vacuous.pass);
}

TEST_CASE("built-in potentials pass the self-check") {
  std::vector<SamplePoint> samples;
  for (int i = 0; i < 10; ++i)
    samples.push_back({0.1 * i, Vec{-1.0 + 0.2 * i, 0.5 - 0.1 * i}});
  CHECK(potential_self_check(
            linear_potential(Vec{0.7, -0.4}, Mat{{1, 0.3}, {0, 0.9}}), samples)
            .pass);
  CHECK(potential_self_check(bridge_potential(2, 1.3, 2.0), samples).pass);
  std::vector<SamplePoint> one_d;
  for (const auto& s : samples) one_d.push_back({s.t, Vec{s.x[0]}});
  CHECK(potential_self_check(*porous1d_scenario(3, 1.5).potential, one_d).pass);
  CHECK(potential_self_check(*ou1d_scenario(1, 0.8).potential, one_d).pass);
}

TEST_CASE("property: right-orthogonal invariance of a and b") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const Potential v = bridge_potential(2, 1.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat s{{1 + std::abs(u(rng)), u(rng)}, {u(rng), 1 + std::abs(u(rng))}};
    const Mat sr = s * rotation(3 * u(rng));
    const Vec x{u(rng), u(rng)};
    const double t = 0.5 * std::abs(u(rng));
    const Mat a1 = eval_a(constant_bundle(Vec(2), s), t, x);
    const Mat a2 = eval_a(constant_bundle(Vec(2), sr), t, x);
    REQUIRE(max_abs(a1 - a2) <= 1e-12);
    const Vec b1 = drift_from_potential(v, [s](double, const Vec&) { return s; })(t, x);
    const Vec b2 = drift_from_potential(v, [sr](double, const Vec&) { return sr; })(t, x);
    REQUIRE((b1 - b2).norm_inf() <= 1e-12 * (1 + b1.norm_inf()));
  }
}

TEST_CASE("property: analytic and FD drift agree") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2, 2);
  const Potential analytic = bridge_potential(2, 1.0, 2.0);
  const Potential fd(2, [analytic](double t, const Vec& x) {
    return analytic.value(t, x);
  });
  const MatrixField sigma = [](double, const Vec&) {
    return Mat{{1, 0.3}, {0, 0.9}};
  };
  const VectorField b1 = drift_from_potential(analytic, sigma);
  const VectorField b2 = drift_from_potential(fd, sigma);
  for (int i = 0; i < 100; ++i) {
    const Vec x{u(rng), u(rng)};
    const double t = 0.45 * (u(rng) + 2);
    REQUIRE((b1(t, x) - b2(t, x)).norm_inf() <= 1e-4);
  }
}

TEST_CASE("scenarios") {
  const Scenario rot = rotational_scenario(1.0);
  CHECK(rot.fields.drift(0, Vec{1, 2}) == Vec{-2, 1});
  CHECK(rot.potential->value(0.3, Vec{1, 2}) == 0.0);

  const Scenario bridge = bridge_scenario(1, 1.0, 2.0);
  // The bridge drift pulls towards 0 at rate 1/(T0 - t).
  CHECK(bridge.fields.drift(1.0, Vec{0.5})[0] == doctest::Approx(-0.5));

  const Scenario ou = ou1d_scenario(2.0, 0.5);
  CHECK(ou.fields.drift(0, Vec{0.5})[0] == doctest::Approx(-1.0));

  const Scenario porous = porous1d_scenario(2.0, 1.5);
  // b = m c^m = Phi(c) and sigma^2 = m c^(m-1).
  CHECK(porous.fields.drift(0, Vec{0.0})[0] == doctest::Approx(4.5));
  const double s = porous.fields.sigma(0, Vec{0.0})(0, 0);
  CHECK(s * s == doctest::Approx(3.0));
}
