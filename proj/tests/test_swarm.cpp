#include <doctest.h>

#include <atomic>
#include <cmath>
#include <limits>

#include "frit/error.hpp"
#include "frit/swarm.hpp"

using namespace frit;

namespace {

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double rosenbrock(std::span<const double> x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

Bounds cube(std::size_t dim, double half) {
  return {std::vector<double>(dim, -half), std::vector<double>(dim, half)};
}

}  // namespace

TEST_CASE("sphere reaches its minimum") {
  PsoConfig cfg;
  cfg.max_iterations = 200;
  const OptimResult r = minimize(sphere, cube(3, 5.0), cfg);
  CHECK(r.best_value <= 1e-6);
  CHECK(r.best_value == doctest::Approx(sphere(r.best_theta)));
}

TEST_CASE("rosenbrock converges for most seeds") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PsoConfig cfg;
    cfg.swarm_size = 50;
    cfg.max_iterations = 300;
    cfg.seed = seed;
    if (minimize(rosenbrock, cube(2, 2.0), cfg).best_value <= 1e-3) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("trace is monotone and ends at the best value") {
  PsoConfig cfg;
  cfg.seed = 17;
  const OptimResult r = minimize(rosenbrock, cube(2, 2.0), cfg);
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.front().iteration == 0);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].best_value <= r.trace[i - 1].best_value);
    CHECK(r.trace[i].iteration == i);
  }
  CHECK(r.trace.back().best_value == r.best_value);
  CHECK(r.evaluations == cfg.swarm_size * r.trace.size());
}

TEST_CASE("same seed gives identical runs, worker count does not matter") {
  PsoConfig cfg;
  cfg.seed = 99;
  cfg.max_iterations = 60;
  const OptimResult a = minimize(rosenbrock, cube(2, 2.0), cfg);
  const OptimResult b = minimize(rosenbrock, cube(2, 2.0), cfg);
  cfg.workers = 4;
  const OptimResult c = minimize(rosenbrock, cube(2, 2.0), cfg);
  for (const OptimResult* other : {&b, &c}) {
    CHECK(other->best_theta == a.best_theta);
    CHECK(other->best_value == a.best_value);
    REQUIRE(other->trace.size() == a.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(other->trace[i].best_value == a.trace[i].best_value);
  }
  cfg.seed = 100;
  CHECK(minimize(rosenbrock, cube(2, 2.0), cfg).best_theta != a.best_theta);
}

TEST_CASE("every evaluated point lies in the box") {
  const Bounds box{{0, 0, 0, 0, 0}, {10, 10, 2, 10, 2}};
  std::atomic<long> outside{0}, calls{0};
  auto checked = [&](std::span<const double> x) {
    ++calls;
    if (!box.contains(x)) ++outside;
    // minimum sits on the boundary so particles keep hitting the clamp
    return std::abs(x[0] + 3.0) + std::abs(x[2] - 5.0) + x[1] + x[3] + x[4];
  };
  PsoConfig cfg;
  cfg.workers = 3;
  const OptimResult r = minimize(checked, box, cfg);
  CHECK(outside == 0);
  CHECK(calls == static_cast<long>(r.evaluations));
  CHECK(r.best_value == doctest::Approx(3.0 + 3.0).epsilon(1e-6));
}

TEST_CASE("injected initial point is never beaten by a worse result") {
  // the start point is the global minimum; a random swarm would not find it exactly
  const std::vector<std::vector<double>> start{{0.123456, -1.5}};
  auto needle = [](std::span<const double> x) {
    return (x[0] == 0.123456 && x[1] == -1.5) ? -1.0 : sphere(x);
  };
  PsoConfig cfg;
  cfg.max_iterations = 20;
  const OptimResult r = minimize(needle, cube(2, 2.0), cfg, start);
  CHECK(r.best_value == -1.0);
  CHECK(r.best_theta == start[0]);
  CHECK(r.trace.front().best_value == -1.0);
}

TEST_CASE("NaN objective values never win") {
  auto nan_left = [](std::span<const double> x) {
    return x[0] < 0.0 ? std::numeric_limits<double>::quiet_NaN() : sphere(x);
  };
  PsoConfig cfg;
  const OptimResult r = minimize(nan_left, cube(2, 1.0), cfg);
  CHECK(std::isfinite(r.best_value));
  CHECK(r.best_theta[0] >= 0.0);
}

TEST_CASE("early stop on stall") {
  PsoConfig cfg;
  cfg.max_iterations = 1000;
  cfg.stall_iterations = 10;
  const OptimResult r = minimize([](std::span<const double>) { return 1.0; }, cube(2, 1.0), cfg);
  CHECK(r.trace.size() == 11);
}

TEST_CASE("configuration validation") {
  const Bounds ok = cube(2, 1.0);
  auto bad = [&](auto mutate) {
    PsoConfig cfg;
    mutate(cfg);
    return cfg;
  };
  CHECK_THROWS_AS(minimize(sphere, ok, bad([](PsoConfig& c) { c.swarm_size = 1; })), Error);
  CHECK_THROWS_AS(minimize(sphere, ok, bad([](PsoConfig& c) { c.max_iterations = 0; })), Error);
  CHECK_THROWS_AS(minimize(sphere, ok, bad([](PsoConfig& c) { c.social_coeff = 0.0; })), Error);
  CHECK_THROWS_AS(minimize(sphere, ok, bad([](PsoConfig& c) { c.inertia_min = 1.0; })), Error);
  CHECK_THROWS_AS(minimize(sphere, ok, bad([](PsoConfig& c) { c.stall_iterations = 0; })), Error);
  CHECK_THROWS_AS(minimize(sphere, ok, bad([](PsoConfig& c) { c.tolerance = -1.0; })), Error);

  const PsoConfig cfg;
  CHECK_THROWS_AS(minimize(sphere, Bounds{{0, 0}, {1}}, cfg), Error);
  CHECK_THROWS_AS(minimize(sphere, Bounds{{0, 2}, {1, 1}}, cfg), Error);
  CHECK_THROWS_AS(minimize(sphere, Bounds{{}, {}}, cfg), Error);
  CHECK_THROWS_AS(minimize(sphere, Bounds{{0, -INFINITY}, {1, 1}}, cfg), Error);
  const std::vector<std::vector<double>> wrong{{1.0, 2.0, 3.0}};
  CHECK_THROWS_AS(minimize(sphere, ok, cfg, wrong), Error);
}

TEST_CASE("objective exceptions propagate from workers") {
  PsoConfig cfg;
  cfg.workers = 2;
  auto throwing = [](std::span<const double> x) -> double {
    if (x[0] > 0.5) throw Error(ErrorCode::kNumerical, "boom");
    return 0.0;
  };
  CHECK_THROWS_AS(minimize(throwing, cube(2, 1.0), cfg), Error);
}
