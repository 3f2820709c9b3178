#include <doctest.h>

#include <cmath>

#include "pathind/error.hpp"
#include "pathind/fields.hpp"
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

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid g(1.0, 1000);
  CHECK(g.dt() == 1e-3);
  CHECK(g.time(1000) == 1.0);
  CHECK(g.time(437) == 437 * g.dt());
  CHECK_THROWS_AS(TimeGrid(0.0, 10), Error);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), Error);
}

TEST_CASE("em_step examples") {
  const Vec x{0, 0};
  CHECK(em_step(constant_bundle(Vec{0, 0}, Mat::identity(2)), 0, Vec{1, 2}, 0.1,
                Vec{0, 0}) == Vec{1, 2});
  const Vec pure = em_step(constant_bundle(Vec{1, -1}, Mat(2)), 0, x, 0.1, Vec{0.3, 0.3});
  CHECK(pure[0] == doctest::Approx(0.1));
  CHECK(pure[1] == doctest::Approx(-0.1));
  const Vec full = em_step(constant_bundle(Vec{1, -1}, Mat{{2, 0}, {0, 2}}), 0, x,
                           0.1, Vec{0.05, 0.05});
  CHECK(full[0] == doctest::Approx(0.2));
  CHECK(std::abs(full[1]) < 1e-15);
}

TEST_CASE("em_step blow-up") {
  FieldBundle fb = constant_bundle(Vec{1e308}, Mat{{1}});
  try {
    (void)em_step(fb, 0, Vec{1e308}, 10.0, Vec{0});
    FAIL("expected NonFiniteState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFiniteState);
  }
}

TEST_CASE("simulate_path examples") {
  const TimeGrid grid(1.0, 50);
  const GaussianStream stream(42);
  const Vec x0{0.5, -0.5};

  const PathRecord bm = simulate_path(constant_bundle(Vec{0, 0}, Mat::identity(2)),
                                      x0, grid, stream, 3);
  REQUIRE(bm.states.size() == 51);
  REQUIRE(bm.increments.size() == 50);
  CHECK(bm.states[0] == x0);
  Vec sum = x0;
  for (const Vec& db : bm.increments) sum = sum + db;
  CHECK(bm.states.back() == sum);

  const PathRecord ode = simulate_path(constant_bundle(Vec{2, -1}, Mat(2)), x0,
                                       grid, stream, 3);
  CHECK(std::abs(ode.states.back()[0] - 2.5) < 1e-12);
  CHECK(std::abs(ode.states.back()[1] + 1.5) < 1e-12);

  const PathRecord again = simulate_path(constant_bundle(Vec{0, 0}, Mat::identity(2)),
                                         x0, grid, stream, 3);
  CHECK(again == bm);
}

TEST_CASE("simulate_path errors name the step") {
  FieldBundle fb;
  fb.dimension = 1;
  fb.drift = [](double, const Vec& x) { return Vec{x[0] * x[0] * 1e10}; };
  fb.sigma = [](double, const Vec&) { return Mat{{0.0}}; };
  try {
    (void)simulate_path(fb, Vec{1.0}, TimeGrid(1.0, 100), GaussianStream(1), 0);
    FAIL("expected NonFiniteState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFiniteState);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
  CHECK_THROWS_AS((void)simulate_path(fb, Vec{1.0, 2.0}, TimeGrid(1.0, 10),
                                      GaussianStream(1), 0),
                  Error);
}

TEST_CASE("linear scenario final state matches closed form from increments") {
  const Mat sigma{{1, 0.3}, {0, 0.9}};
  const Vec c{0.7, -0.4};
  const Scenario s = linear_scenario(c, sigma);
  const TimeGrid grid(1.0, 1000);
  const Vec x0{0.1, 0.2};
  const Vec drift = sigma * (transpose(sigma) * c);
  for (std::uint64_t p = 0; p < 5; ++p) {
    const PathRecord path = simulate_path(s.fields, x0, grid, GaussianStream(42), p);
    Vec bt(2);
    for (const Vec& db : path.increments) bt = bt + db;
    const Vec closed = x0 + drift + sigma * bt;
    CHECK((path.states.back() - closed).norm_inf() < 1e-12);
  }
}

TEST_CASE("simulate_ensemble examples") {
  const FieldBundle bm = constant_bundle(Vec{0, 0}, Mat::identity(2));
  const TimeGrid grid(1.0, 20);
  const Vec x0{1, -1};

  const Ensemble one = simulate_ensemble(bm, x0, grid, 42, 1);
  REQUIRE(one.paths.size() == 1);
  CHECK(one.paths[0] == simulate_path(bm, x0, grid, GaussianStream(42), 0));

  const Ensemble two = simulate_ensemble(bm, x0, grid, 42, 2);
  CHECK(two.paths[0].increments != two.paths[1].increments);

  const std::size_t n = 10000;
  const Ensemble big = simulate_ensemble(bm, x0, grid, 42, n, 2);
  REQUIRE(big.paths.size() == n);
  Vec mean(2);
  for (const auto& p : big.paths) mean = mean + p.states.back();
  mean = (1.0 / n) * mean;
  CHECK(std::abs(mean[0] - x0[0]) <= 3 * std::sqrt(1.0 / n));
  CHECK(std::abs(mean[1] - x0[1]) <= 3 * std::sqrt(1.0 / n));
}

TEST_CASE("property: serial and parallel ensembles are identical") {
  const Scenario s = bridge_scenario(2, 1.0, 2.0);
  const TimeGrid grid(1.0, 64);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Ensemble serial = simulate_ensemble(s.fields, Vec{0.3, 0.1}, grid, seed, 37, 1);
    for (int threads : {2, 3, 8}) {
      const Ensemble par =
          simulate_ensemble(s.fields, Vec{0.3, 0.1}, grid, seed, 37, threads);
      REQUIRE(par.paths == serial.paths);
    }
  }
}

TEST_CASE("ensemble failures are reported with path ids") {
  FieldBundle fb;
  fb.dimension = 1;
  fb.drift = [](double, const Vec& x) { return Vec{x[0] * x[0] * x[0]}; };
  fb.sigma = [](double, const Vec&) { return Mat{{3.0}}; };
  const Ensemble e = simulate_ensemble(fb, Vec{0.0}, TimeGrid(5.0, 10), 1, 50);
  CHECK(!e.failures.empty());
  CHECK(e.paths.size() + e.failures.size() == 50);
  for (const auto& f : e.failures) CHECK(f.path_id < 50);
}

TEST_CASE("coarse increments are sums of fine increments") {
  const GaussianStream stream(9);
  const TimeGrid fine(1.0, 8);
  const TimeGrid coarse(1.0, 2);
  for (int n = 0; n < 2; ++n) {
    Vec sum(2);
    for (int k = 0; k < 4; ++k)
      sum = sum + brownian_increment(stream, fine, 5, 4 * n + k, 2);
    const Vec agg = brownian_increment(stream, coarse, 5, n, 2, 4);
    CHECK((agg - sum).norm_inf() == 0.0);
  }
}
