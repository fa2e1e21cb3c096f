#include <doctest.h>

#include <random>

#include "frit/benchlab.hpp"
#include "frit/error.hpp"
#include "frit/tuning.hpp"
#include "oracles.hpp"

using namespace frit;
using doctest::Approx;

namespace {

double loss_at(const BenchmarkCase& c, std::span<const double> theta) {
  const LossFunction loss(collect_data(c), c.discrete_reference_model(), c.controller);
  return loss(theta).j;
}

std::vector<double> random_in(const Bounds& b, std::mt19937_64& rng) {
  std::vector<double> x(b.dimension());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::uniform_real_distribution<double>(b.lower[i], b.upper[i])(rng);
  return x;
}

}  // namespace

TEST_CASE("builtin cases") {
  CHECK(builtin_case_names() == std::vector<std::string>{"example1", "example2", "example3_io", "example3_fo"});

  const BenchmarkCase ex1 = builtin_case("example1");
  CHECK(ex1.theta0 == std::vector<double>{1, 0, 1, 0, 1});
  CHECK(ex1.bounds.upper == std::vector<double>{10, 10, 2, 10, 2});
  CHECK(ex1.horizon() == 1000);
  CHECK(ex1.reference_signal().size() == 1001);
  CHECK(ex1.reference_signal()[0] == 1.0);

  const BenchmarkCase ex2 = builtin_case("example2");
  CHECK(ex2.discrete_plant().delay_samples() == 50);
  CHECK(ex2.horizon() + 1 == 1001);

  const BenchmarkCase io = builtin_case("example3_io");
  CHECK(io.theta0 == std::vector<double>{0.1, 0.5, 0});
  CHECK(io.bounds.upper == std::vector<double>{5, 5, 5});
  CHECK(io.horizon() + 1 == 81);
  CHECK(io.discrete_plant().delay_samples() == 3);
  CHECK(io.controller.kind == ControllerKind::kIopid);
  CHECK(builtin_case("example3_fo").controller.kind == ControllerKind::kFopid);

  for (const std::string& name : builtin_case_names()) {
    const BenchmarkCase c = builtin_case(name);
    CAPTURE(name);
    CHECK(c.bounds.contains(c.theta0));
    CHECK(c.controller.sample_time == c.sample_time);
    CHECK(c.discrete_plant().sample_time() == c.sample_time);
    CHECK(is_bibo_stable(c.discrete_reference_model()).stable);
  }

  try {
    builtin_case("bogus");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownName);
    CHECK(std::string(e.what()).find("example3_fo") != std::string::npos);
  }
}

TEST_CASE("initial losses reproduce the published values") {
  CHECK(loss_at(builtin_case("example1"), builtin_case("example1").theta0) == Approx(496.1250).epsilon(0.01));
  CHECK(loss_at(builtin_case("example2"), builtin_case("example2").theta0) == Approx(508.6346).epsilon(0.01));
  const BenchmarkCase io = builtin_case("example3_io"), fo = builtin_case("example3_fo");
  const double j_io = loss_at(io, io.theta0), j_fo = loss_at(fo, fo.theta0);
  CHECK(j_io == Approx(28.6451).epsilon(0.01));
  CHECK(j_fo == Approx(j_io).epsilon(1e-12));
}

TEST_CASE("collected data matches the closed loop") {
  for (const std::string& name : builtin_case_names()) {
    const BenchmarkCase c = builtin_case(name);
    const ExperimentRecord data = collect_data(c);
    const DiscreteTf c0 = realize_controller(c.theta0, c.controller);
    const DiscreteTf t = feedback_unity(c.discrete_plant(), c0);
    const Signal y = simulate(t, c.reference_signal());
    CAPTURE(name);
    CHECK(data.size() == c.horizon() + 1);
    CHECK(oracle::max_abs_diff(data.y0().samples(), y.samples()) <= 1e-8);
    // u0 = C0 (r0 - y0)
    std::vector<double> e(data.size());
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = data.r0()[k] - data.y0()[k];
    CHECK(oracle::max_abs_diff(data.u0().samples(), simulate(c0, Signal(e, c.sample_time)).samples()) <= 1e-8);
  }
}

TEST_CASE("validation at theta0 equals the initial loss") {
  for (const std::string& name : builtin_case_names()) {
    const BenchmarkCase c = builtin_case(name);
    const ValidationReport v = validate(c, c.theta0);
    CAPTURE(name);
    CHECK(v.tracking_error_l1 == Approx(loss_at(c, c.theta0)).epsilon(1e-6));
    CHECK(v.y_closed_loop.size() == c.horizon() + 1);
  }
  CHECK(validate(builtin_case("example1"), builtin_case("example1").theta0).stable);
  CHECK(validate(builtin_case("example2"), builtin_case("example2").theta0).stable);
  // the flexible-transmission experiment loop is slightly unstable
  const ValidationReport v3 = validate(builtin_case("example3_io"), builtin_case("example3_io").theta0);
  CHECK_FALSE(v3.stable);
  CHECK(v3.max_pole_magnitude == Approx(1.0154).epsilon(1e-4));
}

TEST_CASE("loss and validation agree away from theta0") {
  std::mt19937_64 rng(21);
  for (const std::string& name : {"example3_io", "example3_fo", "example1"}) {
    const BenchmarkCase c = builtin_case(name);
    const LossFunction loss(collect_data(c), c.discrete_reference_model(), c.controller);
    int compared = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const std::vector<double> theta = random_in(c.bounds, rng);
      const LossBreakdown b = loss(theta);
      if (b.penalized) continue;
      ++compared;
      const ValidationReport v = validate(c, theta);
      CAPTURE(name);
      CAPTURE(trial);
      CHECK(std::abs(v.tracking_error_l1 - b.j) <= 1e-6 * (1.0 + b.j));
    }
    CHECK(compared > 0);
  }
}

TEST_CASE("validation verdicts") {
  SUBCASE("published example 1 gains are stable and tracked") {
    const BenchmarkCase c = builtin_case("example1");
    const ValidationReport v = validate(c, c.published.theta_star);
    CHECK(v.stable);
    CHECK(v.tracking_error_l1 == Approx(loss_at(c, c.published.theta_star)).epsilon(1e-6));
    CHECK(v.tracking_error_l1 < 0.6);
  }
  SUBCASE("high proportional gain destabilizes example 2") {
    const BenchmarkCase c = builtin_case("example2");
    std::vector<double> theta = c.theta0;
    theta[0] = c.bounds.upper[0];
    const ValidationReport v = validate(c, theta);
    CHECK_FALSE(v.stable);
    CHECK(v.max_pole_magnitude > 1.0);
  }
  SUBCASE("integer derivative leaves a marginal pole at -1") {
    // Tustin maps s to a pole at z = -1 that the loop cannot move.
    const BenchmarkCase c = builtin_case("example1");
    const ValidationReport v = validate(c, std::vector<double>{1, 0, 1, 0.5, 1});
    CHECK_FALSE(v.stable);
    CHECK(v.max_pole_magnitude == Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("trace bookkeeping") {
    const BenchmarkCase c = builtin_case("example3_io");
    const ValidationReport v = validate(c, std::vector<double>{0.3, 1.0, 0.0});
    double peak = 0.0, total = 0.0, err = 0.0;
    for (std::size_t k = 0; k < v.u.size(); ++k) {
      peak = std::max(peak, std::abs(v.u[k]));
      total += std::abs(v.u[k]);
      err += std::abs(v.y_closed_loop[k] - v.y_model[k]);
    }
    CHECK(v.max_abs_input == peak);
    CHECK(v.input_l1 == Approx(total));
    CHECK(v.tracking_error_l1 == Approx(err));
    CHECK(v.r == std::vector<double>(81, 1.0));
  }
}

TEST_CASE("FO/IO comparison") {
  const BenchmarkCase io = builtin_case("example3_io"), fo = builtin_case("example3_fo");
  SUBCASE("identical controllers give identical metrics") {
    const std::vector<double> th_io{0.8, 0.9, 0.1}, th_fo{0.8, 0.9, 1.0, 0.1, 1.0};
    const ValidationReport vi = validate(io, th_io), vf = validate(fo, th_fo);
    const ControllerComparison cmp = compare_fo_io(vf, loss_at(fo, th_fo), vi, loss_at(io, th_io));
    CHECK(cmp.j_fo == Approx(cmp.j_io).epsilon(1e-9));
    CHECK(cmp.tracking_error_l1_fo == Approx(cmp.tracking_error_l1_io).epsilon(1e-9));
    CHECK(cmp.max_abs_input_fo == Approx(cmp.max_abs_input_io).epsilon(1e-9));
    CHECK(oracle::max_abs_diff(cmp.abs_error_fo, cmp.abs_error_io) <= 1e-9);
  }
  SUBCASE("published gains keep the published ordering") {
    const ValidationReport vi = validate(io, io.published.theta_star);
    const ValidationReport vf = validate(fo, fo.published.theta_star);
    const ControllerComparison cmp =
        compare_fo_io(vf, loss_at(fo, fo.published.theta_star), vi, loss_at(io, io.published.theta_star));
    CHECK(cmp.fo_lower_loss);
    CHECK(cmp.abs_error_fo.size() == 81);
  }
}

TEST_CASE("tuning example 3 without a plant model") {
  const BenchmarkCase c = builtin_case("example3_io");
  TuningProblem problem{collect_data(c), c.discrete_reference_model(), c.controller, c.bounds, c.theta0, PsoConfig{}};
  const std::vector<std::uint64_t> seeds{1, 2};
  std::vector<TuningReport> runs;
  const TuningReport best = tune_best_of(problem, seeds, &runs);
  REQUIRE(runs.size() == 2);
  CHECK(best.j_star == std::min(runs[0].j_star, runs[1].j_star));
  for (const TuningReport& r : runs) {
    CHECK(r.j_star <= r.j0);
    CHECK(r.j0 == Approx(loss_at(c, c.theta0)).epsilon(1e-12));
    CHECK(c.bounds.contains(r.theta_star));
    CHECK(r.nonpenalized_evaluations + r.penalized_evaluations == r.optim.evaluations);
    CHECK(r.bound_violations <= r.nonpenalized_evaluations);
    CHECK(r.breakdown_star.j == r.j_star);
  }
  CHECK(best.j_star <= 1.5);

  // a rerun with the same seed is identical
  problem.pso.seed = best.seed;
  const TuningReport again = tune(problem);
  CHECK(again.theta_star == best.theta_star);
  CHECK(again.j_star == best.j_star);

  CHECK_THROWS_AS(tune_best_of(problem, std::span<const std::uint64_t>{}), Error);
}
