#pragma once

// Random closed-loop experiments shared by the unit tests and the acceptance
// suite. The plant only ever reaches the library through the recorded data.

#include <random>
#include <vector>

#include "frit/idfrit.hpp"
#include "oracles.hpp"

namespace fixture {

inline const frit::OustaloupConfig kBand{5, 1e-6, 1e3};

inline frit::ControllerTemplate iopid(double ts) { return {frit::ControllerKind::kIopid, kBand, ts}; }
inline frit::ControllerTemplate fopid(double ts) { return {frit::ControllerKind::kFopid, kBand, ts}; }

// Closed-loop experiment with controller theta0 on plant p.
inline frit::ExperimentRecord run_experiment(const frit::DiscreteTf& p, std::span<const double> theta0,
                                             const frit::ControllerTemplate& tpl, const frit::Signal& r0) {
  const frit::DiscreteTf c0 = frit::realize_controller(theta0, tpl);
  const frit::LoopTrace loop = frit::simulate_unity_loop(p, c0, r0.samples());
  return frit::ExperimentRecord(r0, frit::Signal(loop.u, r0.sample_time()), frit::Signal(loop.y, r0.sample_time()));
}

// Strictly proper, stable, degree 1..3.
inline frit::DiscreteTf random_plant(std::mt19937_64& rng, double ts) {
  std::uniform_int_distribution<int> deg(1, 3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int n = deg(rng);
  const auto roots = oracle::stable_roots(rng, n, 0.9);
  std::vector<double> num(static_cast<std::size_t>(n));
  for (double& v : num) v = coef(rng);
  num[0] = num[0] >= 0 ? num[0] + 0.1 : num[0] - 0.1;
  return frit::DiscreteTf(frit::Polynomial(num), frit::Polynomial(oracle::poly_from_roots(roots)), ts);
}

// Plant together with a PI controller that stabilizes it; plants that no
// drawn gain set stabilizes are redrawn.
struct Setup {
  frit::DiscreteTf plant;
  std::vector<double> theta0;
};

inline Setup stabilized_plant(std::mt19937_64& rng, double ts) {
  std::uniform_real_distribution<double> gain(0.05, 1.5);
  const frit::ControllerTemplate tpl = iopid(ts);
  for (;;) {
    frit::DiscreteTf p = random_plant(rng, ts);
    const double sign = p.evaluate(1.0).real() < 0.0 ? -1.0 : 1.0;
    for (int attempt = 0; attempt < 50; ++attempt) {
      std::vector<double> theta{sign * gain(rng), sign * gain(rng), 0.0};
      if (frit::is_bibo_stable(frit::feedback_unity(p, frit::realize_controller(theta, tpl))).stable)
        return {p, theta};
    }
  }
}

// Relative gap between the data-only response and the simulated loop, or a
// negative value when the pipeline penalized theta.
struct Reconstruction {
  double relative_error = -1.0;
  bool evaluated = false;
};

inline std::vector<Reconstruction> reconstruction_trials(std::uint64_t seed, int wanted, int max_draws) {
  std::mt19937_64 rng(seed);
  const double ts = 0.1;
  const std::size_t n = 60;
  std::uniform_real_distribution<double> gain(0.05, 1.5);
  const frit::DiscreteTf md(frit::Polynomial({0.5}), frit::Polynomial({1.0, -0.5}), ts);
  const std::vector<double> r(n, 1.0);
  std::vector<Reconstruction> out;
  int evaluated = 0;
  for (int draw = 0; draw < max_draws && evaluated < wanted; ++draw) {
    const auto [p, theta0] = stabilized_plant(rng, ts);
    const double sign = theta0[0] < 0.0 ? -1.0 : 1.0;
    const std::vector<double> theta{sign * gain(rng), sign * gain(rng), sign * 0.2 * gain(rng)};
    const frit::ExperimentRecord data = run_experiment(p, theta0, iopid(ts), frit::Signal(r, ts));
    const auto e = frit::LossFunction(data, md, iopid(ts)).evaluate(theta);
    if (e.breakdown.penalized) {
      out.push_back({});
      continue;
    }
    ++evaluated;
    const frit::LoopTrace truth = frit::simulate_unity_loop(p, frit::realize_controller(theta, iopid(ts)), r);
    out.push_back({oracle::max_abs_diff(e.y, truth.y) / (1.0 + oracle::inf_norm(truth.y)), true});
  }
  return out;
}

}  // namespace fixture
