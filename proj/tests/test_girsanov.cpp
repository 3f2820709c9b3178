#include <doctest.h>

#include <cmath>
#include <vector>

#include "pathind/error.hpp"
#include "pathind/fields.hpp"
#include "pathind/girsanov.hpp"
#include "pathind/sde.hpp"

using namespace pathind;

namespace {

FieldBundle constant_bundle(const Vec& b, const Mat& sigma) {
  FieldBundle fb;
  fb.dimension = b.size();
  fb.drift = [b](double, const Vec&) { return b; };
  fb.sigma = [sigma](double, const Vec&) { return sigma; };
  return fb;
}

std::vector<double> final_weights(const FieldBundle& fb, const Vec& x0,
                                  const TimeGrid& grid, std::size_t n) {
  const Ensemble e = simulate_ensemble(fb, x0, grid, 42, n, 2);
  std::vector<double> w;
  for (const auto& p : e.paths) w.push_back(density_process(fb, p).weights().back());
  return w;
}

}  // namespace

TEST_CASE("zhat_increment examples") {
  const Vec x{0, 0};
  CHECK(zhat_increment(constant_bundle(Vec{0, 0}, Mat::identity(2)), 0, x, 0.01,
                       Vec{0.3, 0.2}) == 0.0);
  const ZhatParts p = zhat_parts(constant_bundle(Vec{1, 2}, Mat::identity(2)), 0, x,
                                 0.01, Vec{0.1, -0.05});
  CHECK(p.stochastic == doctest::Approx(0.0).scale(1));
  CHECK(std::abs(p.stochastic) < 1e-16);
  CHECK(p.quadratic == doctest::Approx(0.025));
  CHECK(p.total() == doctest::Approx(0.025));
  CHECK(zhat_increment(constant_bundle(Vec{2, 4}, Mat{{2, 0}, {0, 2}}), 0, x, 0.1,
                       Vec{0, 0}) == doctest::Approx(0.25));
  CHECK_THROWS_AS((void)zhat_increment(constant_bundle(Vec{1, 1}, Mat(2)), 0, x,
                                       0.1, Vec{0, 0}),
                  Error);
}

TEST_CASE("density_process examples") {
  const TimeGrid grid(1.0, 10);
  const FieldBundle bm = constant_bundle(Vec{0, 0}, Mat::identity(2));
  const PathRecord path = simulate_path(bm, Vec{0, 0}, grid, GaussianStream(1), 0);
  const GirsanovSeries zero = density_process(bm, path);
  for (std::size_t n = 0; n < zero.zhat.size(); ++n) {
    CHECK(zero.zhat[n] == 0.0);
    CHECK(zero.weight(n) == 1.0);
  }

  PathRecord one{TimeGrid(0.01, 1), 0, {Vec{0, 0}, Vec{0, 0}}, {Vec{0.1, -0.05}}};
  const GirsanovSeries s =
      density_process(constant_bundle(Vec{1, 2}, Mat::identity(2)), one);
  REQUIRE(s.zhat.size() == 2);
  CHECK(s.zhat[0] == 0.0);
  CHECK(s.zhat[1] == doctest::Approx(0.025));
}

TEST_CASE("density_process singular sigma names the step") {
  FieldBundle fb;
  fb.dimension = 1;
  fb.drift = [](double, const Vec&) { return Vec{1.0}; };
  fb.sigma = [](double t, const Vec&) { return Mat{{t < 0.35 ? 1.0 : 0.0}}; };
  PathRecord path{TimeGrid(1.0, 10), 0, std::vector<Vec>(11, Vec{0.0}),
                  std::vector<Vec>(10, Vec{0.0})};
  try {
    (void)density_process(fb, path);
    FAIL("expected SingularMatrix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMatrix);
    CHECK(std::string(e.what()).find("step 4") != std::string::npos);
  }
}

TEST_CASE("linear scenario zhat matches the closed form on every path") {
  const Mat sigma{{1, 0.3}, {0, 0.9}};
  const Vec c{0.7, -0.4};
  const Scenario s = linear_scenario(c, sigma);
  const Vec sc = transpose(sigma) * c;
  const TimeGrid grid(1.0, 200);
  const Ensemble e = simulate_ensemble(s.fields, Vec{0, 0}, grid, 42, 50);
  for (const auto& p : e.paths) {
    Vec bt(2);
    for (const Vec& db : p.increments) bt = bt + db;
    const double closed = dot(sc, bt) + 0.5 * dot(sc, sc) * 1.0;
    REQUIRE(std::abs(density_process(s.fields, p).zhat.back() - closed) <= 1e-10);
  }
}

TEST_CASE("series invariants") {
  const Scenario s = bridge_scenario(1, 1.0, 2.0);
  const Ensemble e = simulate_ensemble(s.fields, Vec{0.5}, TimeGrid(1.0, 100), 7, 20);
  for (const auto& p : e.paths) {
    const GirsanovSeries g = density_process(s.fields, p);
    REQUIRE(g.zhat[0] == 0.0);
    for (std::size_t n = 0; n < g.zhat.size(); ++n) {
      REQUIRE(g.weight(n) > 0.0);
      REQUIRE(std::abs(g.weight(n) * std::exp(g.zhat[n]) - 1.0) <= 1e-12);
      if (n > 0) REQUIRE(g.quadratic[n] >= g.quadratic[n - 1]);
    }
  }
}

TEST_CASE("martingale_check examples") {
  const TimeGrid grid(1.0, 10);
  const MartingaleCheck zero =
      martingale_check(final_weights(constant_bundle(Vec{0}, Mat{{1}}), Vec{0}, grid, 100));
  CHECK(zero.mean == 1.0);
  CHECK(zero.std_error == 0.0);
  CHECK(zero.pass);

  const Scenario lin = linear_scenario(Vec{0.7, -0.4}, Mat{{1, 0.3}, {0, 0.9}});
  const MartingaleCheck good =
      martingale_check(final_weights(lin.fields, Vec{0, 0}, grid, 20000));
  CHECK(good.n == 20000);
  CHECK(good.pass);

  // Doubling the quadratic part shifts every log-weight down by |sigma^T c|^2 T / 2.
  std::vector<double> faulty = final_weights(lin.fields, Vec{0, 0}, grid, 20000);
  const Vec sc = transpose(Mat{{1, 0.3}, {0, 0.9}}) * Vec{0.7, -0.4};
  for (double& w : faulty) w *= std::exp(-0.5 * dot(sc, sc));
  const MartingaleCheck bad = martingale_check(faulty);
  CHECK(!bad.pass);
  CHECK(bad.mean < 1.0);

  CHECK_THROWS_AS((void)martingale_check(std::vector<double>(99, 1.0)), Error);
}
