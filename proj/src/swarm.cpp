#include "frit/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "frit/error.hpp"

namespace frit {

void Bounds::validate() const {
  if (lower.size() != upper.size()) throw Error(ErrorCode::kInvalidArgument, "bounds: lower/upper dimension mismatch");
  if (lower.empty()) throw Error(ErrorCode::kInvalidArgument, "bounds: empty box");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw Error(ErrorCode::kInvalidArgument, "bounds must be finite");
    if (lower[i] > upper[i]) throw Error(ErrorCode::kInvalidArgument, "bounds: lower exceeds upper");
  }
}

bool Bounds::contains(std::span<const double> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  return true;
}

void PsoConfig::validate() const {
  if (swarm_size < 2) throw Error(ErrorCode::kInvalidArgument, "swarm_size must be >= 2");
  if (max_iterations < 1) throw Error(ErrorCode::kInvalidArgument, "max_iterations must be >= 1");
  if (!(cognitive_coeff > 0.0) || !(social_coeff > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "PSO coefficients must be positive");
  if (!(inertia_min > 0.0) || !(inertia_min <= inertia_max))
    throw Error(ErrorCode::kInvalidArgument, "inertia range must be ordered and positive");
  if (stall_iterations < 1) throw Error(ErrorCode::kInvalidArgument, "stall_iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be non-negative");
}

namespace {

// Same stream on every platform, unlike std::uniform_real_distribution.
class Uniform01 {
 public:
  explicit Uniform01(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

double sanitize(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

void evaluate_all(const Objective& objective, const std::vector<std::vector<double>>& points,
                  std::vector<double>& values, unsigned workers) {
  const std::size_t n = points.size();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) values[i] = sanitize(objective(points[i]));
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    for (unsigned w = 0; w < count; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += count) values[i] = sanitize(objective(points[i]));
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

OptimResult minimize(const Objective& objective, const Bounds& bounds, const PsoConfig& cfg,
                     std::span<const std::vector<double>> initial_points) {
  bounds.validate();
  cfg.validate();
  const std::size_t dim = bounds.dimension();
  const std::size_t swarm = cfg.swarm_size;
  for (const auto& p : initial_points)
    if (p.size() != dim) throw Error(ErrorCode::kInvalidArgument, "initial point dimension mismatch");

  Uniform01 uniform(cfg.seed);
  std::vector<std::vector<double>> x(swarm, std::vector<double>(dim));
  std::vector<std::vector<double>> v(swarm, std::vector<double>(dim));
  for (std::size_t i = 0; i < swarm; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double span = bounds.upper[d] - bounds.lower[d];
      x[i][d] = bounds.lower[d] + uniform() * span;
      v[i][d] = (2.0 * uniform() - 1.0) * span;
    }
  }
  for (std::size_t i = 0; i < std::min(swarm, initial_points.size()); ++i)
    for (std::size_t d = 0; d < dim; ++d)
      x[i][d] = std::clamp(initial_points[i][d], bounds.lower[d], bounds.upper[d]);

  std::vector<double> f(swarm);
  evaluate_all(objective, x, f, cfg.workers);

  OptimResult result;
  result.evaluations = swarm;
  std::vector<std::vector<double>> pbest = x;
  std::vector<double> pbest_f = f;
  std::size_t best = 0;
  for (std::size_t i = 1; i < swarm; ++i)
    if (f[i] < f[best]) best = i;
  result.best_theta = x[best];
  result.best_value = f[best];
  result.trace.push_back({0, result.best_value});

  double inertia = cfg.inertia_max;
  int stall_counter = 0;
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    for (std::size_t i = 0; i < swarm; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double r1 = uniform();
        const double r2 = uniform();
        double vel = inertia * v[i][d] + cfg.cognitive_coeff * r1 * (pbest[i][d] - x[i][d]) +
                     cfg.social_coeff * r2 * (result.best_theta[d] - x[i][d]);
        double pos = x[i][d] + vel;
        if (pos < bounds.lower[d]) {
          pos = bounds.lower[d];
          vel = 0.0;
        } else if (pos > bounds.upper[d]) {
          pos = bounds.upper[d];
          vel = 0.0;
        }
        v[i][d] = vel;
        x[i][d] = pos;
      }
    }
    evaluate_all(objective, x, f, cfg.workers);
    result.evaluations += swarm;

    bool improved = false;
    for (std::size_t i = 0; i < swarm; ++i) {
      if (f[i] < pbest_f[i]) {
        pbest_f[i] = f[i];
        pbest[i] = x[i];
      }
      if (f[i] < result.best_value) {
        result.best_value = f[i];
        result.best_theta = x[i];
        improved = true;
      }
    }
    result.trace.push_back({it, result.best_value});

    stall_counter = improved ? std::max(0, stall_counter - 1) : stall_counter + 1;
    if (stall_counter < 2) inertia *= 2.0;
    if (stall_counter > 5) inertia *= 0.5;
    inertia = std::clamp(inertia, cfg.inertia_min, cfg.inertia_max);

    if (it >= cfg.stall_iterations) {
      const double earlier = result.trace[it - cfg.stall_iterations].best_value;
      const double scale = std::max(1.0, std::abs(result.best_value));
      if (earlier - result.best_value <= cfg.tolerance * scale) break;
    }
  }
  return result;
}

}  // namespace frit
