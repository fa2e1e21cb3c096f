#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "frit/idfrit.hpp"
#include "frit/swarm.hpp"

namespace frit {

struct TuningProblem {
  ExperimentRecord data;
  DiscreteTf reference_model;
  ControllerTemplate controller;
  Bounds bounds;
  std::vector<double> theta0;  // controller used for data collection; seeded into the swarm
  PsoConfig pso;
};

struct TuningReport {
  std::uint64_t seed = 0;
  std::vector<double> theta0;
  std::vector<double> theta_star;
  double j0 = 0.0;
  double j_star = 0.0;
  LossBreakdown breakdown_star;
  StabilityBoundReport bound_star;
  OptimResult optim;
  // Stability-bound bookkeeping over every evaluation of the search.
  std::size_t nonpenalized_evaluations = 0;
  std::size_t penalized_evaluations = 0;
  std::size_t bound_violations = 0;
  std::size_t induced_bound_violations = 0;
  double worst_bound_ratio = 0.0;  // max t_l1 / bound seen
};

/// Minimizes the data-only loss over the box; needs no plant model.
TuningReport tune(const TuningProblem& problem);

/// Runs tune() once per seed and returns the report with the lowest J(theta*)
/// (earliest seed on ties). `per_seed`, when given, receives every run.
TuningReport tune_best_of(const TuningProblem& problem, std::span<const std::uint64_t> seeds,
                          std::vector<TuningReport>* per_seed = nullptr);

}  // namespace frit
