#include "frit/tuning.hpp"

#include <atomic>
#include <mutex>

#include "frit/error.hpp"

namespace frit {

TuningReport tune(const TuningProblem& problem) {
  problem.bounds.validate();
  if (problem.bounds.dimension() != problem.controller.dimension())
    throw Error(ErrorCode::kInvalidArgument, "bounds dimension does not match the controller");
  if (problem.theta0.size() != problem.controller.dimension())
    throw Error(ErrorCode::kInvalidArgument, "theta0 dimension does not match the controller");

  const LossFunction loss(problem.data, problem.reference_model, problem.controller);

  std::atomic<std::size_t> nonpenalized{0};
  std::atomic<std::size_t> penalized{0};
  std::atomic<std::size_t> violations{0};
  std::atomic<std::size_t> induced_violations{0};
  std::mutex ratio_mutex;
  double worst_ratio = 0.0;

  const Objective objective = [&](std::span<const double> theta) {
    const LossFunction::Evaluation e = loss.evaluate(theta);
    if (e.breakdown.penalized) {
      ++penalized;
      return e.breakdown.j;
    }
    ++nonpenalized;
    const StabilityBoundReport bound = loss.bound_report(e);
    if (!bound.satisfied) ++violations;
    if (!bound.induced_satisfied) ++induced_violations;
    if (bound.bound > 0.0) {
      std::lock_guard lock(ratio_mutex);
      worst_ratio = std::max(worst_ratio, bound.t_l1 / bound.bound);
    }
    return e.breakdown.j;
  };

  const std::vector<std::vector<double>> seeds{problem.theta0};
  TuningReport report;
  report.seed = problem.pso.seed;
  report.theta0 = problem.theta0;
  report.optim = minimize(objective, problem.bounds, problem.pso, seeds);
  report.theta_star = report.optim.best_theta;
  report.j0 = loss(problem.theta0).j;

  const LossFunction::Evaluation star = loss.evaluate(report.theta_star);
  report.breakdown_star = star.breakdown;
  report.j_star = star.breakdown.j;
  if (!star.breakdown.penalized) report.bound_star = loss.bound_report(star);

  report.nonpenalized_evaluations = nonpenalized.load();
  report.penalized_evaluations = penalized.load();
  report.bound_violations = violations.load();
  report.induced_bound_violations = induced_violations.load();
  report.worst_bound_ratio = worst_ratio;
  return report;
}

TuningReport tune_best_of(const TuningProblem& problem, std::span<const std::uint64_t> seeds,
                          std::vector<TuningReport>* per_seed) {
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "at least one seed is required");
  std::optional<TuningReport> best;
  for (std::uint64_t seed : seeds) {
    TuningProblem run = problem;
    run.pso.seed = seed;
    TuningReport report = tune(run);
    if (per_seed) per_seed->push_back(report);
    if (!best || report.j_star < best->j_star) best = std::move(report);
  }
  return *best;
}

}  // namespace frit
