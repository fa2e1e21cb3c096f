#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace frit {

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const { return lower.size(); }
  void validate() const;
  bool contains(std::span<const double> x) const;
};

struct PsoConfig {
  std::size_t swarm_size = 50;
  std::size_t max_iterations = 200;
  double inertia_min = 0.4;
  double inertia_max = 0.9;
  double cognitive_coeff = 1.49;
  double social_coeff = 1.49;
  std::uint64_t seed = 1;
  std::size_t stall_iterations = 40;
  double tolerance = 1e-8;
  // Objective evaluations per iteration are spread over this many threads.
  // Results do not depend on it.
  unsigned workers = 1;

  void validate() const;
};

struct TracePoint {
  std::size_t iteration;
  double best_value;
};

struct OptimResult {
  std::vector<double> best_theta;
  double best_value = 0.0;
  std::vector<TracePoint> trace;  // iteration 0 is the initial swarm
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Global-best particle swarm over a box.
///
/// Particles start uniformly in the box (after any `initial_points`, which
/// take the first slots), positions leaving the box are clamped with the
/// offending velocity component zeroed, and the inertia weight adapts inside
/// [inertia_min, inertia_max]: it grows while the swarm keeps improving and
/// halves after repeated stalls. The search stops after max_iterations, or
/// when the best value improved by no more than `tolerance` (relative) over
/// the last stall_iterations iterations. The objective must return a value
/// for every point of the box.
OptimResult minimize(const Objective& objective, const Bounds& bounds, const PsoConfig& cfg,
                     std::span<const std::vector<double>> initial_points = {});

}  // namespace frit
