#include "frit/benchlab.hpp"

#include <algorithm>
#include <cmath>

#include "frit/error.hpp"

namespace frit {

namespace {

DiscreteTf discretize(const AnyTf& g, double ts) {
  if (const auto* d = std::get_if<DiscreteTf>(&g)) {
    if (!same_sample_time(d->sample_time(), ts))
      throw Error(ErrorCode::kSampleTimeMismatch, "discrete model sample time differs from the case");
    return *d;
  }
  return tustin(std::get<ContinuousTf>(g), ts);
}

ContinuousTf process_plant(double dead_time) {
  return ContinuousTf({12.0, 8.0}, {20.0, 113.0, 147.0, 62.0, 8.0}, dead_time);
}

ContinuousTf second_order_lag() { return ContinuousTf({1.0}, {1.0, 2.0, 1.0}); }

BenchmarkCase process_case(std::string name, double dead_time) {
  BenchmarkCase c;
  c.name = std::move(name);
  c.plant = process_plant(dead_time);
  c.reference_model = second_order_lag();
  c.sample_time = 0.1;
  c.sim_time = 100.0;
  c.theta0 = {1.0, 0.0, 1.0, 0.0, 1.0};
  c.bounds = {{0.0, 0.0, 0.0, 0.0, 0.0}, {10.0, 10.0, 2.0, 10.0, 2.0}};
  c.controller = {ControllerKind::kFopid, OustaloupConfig{5, 1e-6, 1e3}, 0.1};
  return c;
}

// Flexible transmission, already in z at 0.05 s; the z^-3 factor is the delay.
BenchmarkCase flexible_transmission_case(std::string name, ControllerKind kind) {
  constexpr double ts = 0.05;
  const double alpha = std::exp(-ts * 10.0);
  const double g = (1.0 - alpha) * (1.0 - alpha);

  BenchmarkCase c;
  c.name = std::move(name);
  c.plant = DiscreteTf({0.28261, 0.50666, 0.0, 0.0, 0.0}, {1.0, -1.41833, 1.58939, -1.31608, 0.88642}, ts, 3);
  c.reference_model = DiscreteTf({g, 0.0, 0.0}, {1.0, -2.0 * alpha, alpha * alpha}, ts, 3);
  c.sample_time = ts;
  c.sim_time = 4.0;
  c.controller = {kind, OustaloupConfig{5, 1e-6, 1e3}, ts};
  if (kind == ControllerKind::kIopid) {
    c.theta0 = {0.1, 0.5, 0.0};
    c.bounds = {{0.0, 0.0, 0.0}, {5.0, 5.0, 5.0}};
  } else {
    c.theta0 = {0.1, 0.5, 1.0, 0.0, 1.0};
    c.bounds = {{0.0, 0.0, 0.0, 0.0, 0.0}, {5.0, 5.0, 2.0, 5.0, 2.0}};
  }
  return c;
}

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

std::size_t BenchmarkCase::horizon() const {
  return static_cast<std::size_t>(std::llround(sim_time / sample_time));
}

DiscreteTf BenchmarkCase::discrete_plant() const { return discretize(plant, sample_time); }

DiscreteTf BenchmarkCase::discrete_reference_model() const { return discretize(reference_model, sample_time); }

Signal BenchmarkCase::reference_signal() const {
  return Signal(std::vector<double>(horizon() + 1, step_amplitude), sample_time);
}

const std::vector<std::string>& builtin_case_names() {
  static const std::vector<std::string> names{"example1", "example2", "example3_io", "example3_fo"};
  return names;
}

BenchmarkCase builtin_case(const std::string& name) {
  if (name == "example1") {
    BenchmarkCase c = process_case(name, 0.0);
    c.published = {496.1250, 0.3805, {2.7563, 0.5105, 0.9966, 2.6412, 0.8482}};
    return c;
  }
  if (name == "example2") {
    BenchmarkCase c = process_case(name, 5.0);
    c.published = {508.6346, 53.3317, {1.4675, 0.1368, 1.0147, 5.0724, 1.3177}};
    return c;
  }
  if (name == "example3_io") {
    BenchmarkCase c = flexible_transmission_case(name, ControllerKind::kIopid);
    c.published = {28.6451, 1.1129, {0.0214, 3.3025, 0.0209}};
    return c;
  }
  if (name == "example3_fo") {
    BenchmarkCase c = flexible_transmission_case(name, ControllerKind::kFopid);
    c.published = {28.6451, 0.8087, {1.0894e-9, 3.3490, 1.0018, 0.0242, 0.9448}};
    return c;
  }
  std::string valid;
  for (const auto& n : builtin_case_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::kUnknownName, "unknown example '" + name + "' (valid: " + valid + ")");
}

ExperimentRecord collect_data(const DiscreteTf& plant, const DiscreteTf& controller, const Signal& r0) {
  LoopTrace loop = simulate_unity_loop(plant, controller, r0.samples());
  const double ts = r0.sample_time();
  return ExperimentRecord(r0, Signal(std::move(loop.u), ts), Signal(std::move(loop.y), ts));
}

ExperimentRecord collect_data(const BenchmarkCase& bench) {
  return collect_data(bench.discrete_plant(), realize_controller(bench.theta0, bench.controller),
                      bench.reference_signal());
}

ValidationReport validate(const DiscreteTf& plant, const DiscreteTf& reference_model,
                          const ControllerTemplate& controller, std::span<const double> theta,
                          const Signal& r) {
  const DiscreteTf c = realize_controller(theta, controller);
  ValidationReport report;
  report.closed_loop_poles = poles(feedback_unity(plant, c));
  for (const auto& p : report.closed_loop_poles)
    report.max_pole_magnitude = std::max(report.max_pole_magnitude, std::abs(p));
  report.stable = report.max_pole_magnitude < 1.0 - kMarginalPoleTolerance;

  LoopTrace loop = simulate_unity_loop(plant, c, r.samples());
  const Signal model = simulate(reference_model, r);
  report.r.assign(r.samples().begin(), r.samples().end());
  report.y_model.assign(model.samples().begin(), model.samples().end());
  report.y_closed_loop = std::move(loop.y);
  report.u = std::move(loop.u);

  for (std::size_t k = 0; k < report.r.size(); ++k)
    report.tracking_error_l1 += std::abs(report.y_closed_loop[k] - report.y_model[k]);
  for (double u : report.u) report.max_abs_input = std::max(report.max_abs_input, std::abs(u));
  report.input_l1 = l1(report.u);
  return report;
}

ValidationReport validate(const BenchmarkCase& bench, std::span<const double> theta) {
  return validate(bench.discrete_plant(), bench.discrete_reference_model(), bench.controller, theta,
                  bench.reference_signal());
}

ControllerComparison compare_fo_io(const ValidationReport& fo, double j_fo, const ValidationReport& io,
                                   double j_io) {
  if (fo.r.size() != io.r.size()) throw Error(ErrorCode::kInvalidArgument, "comparison needs equal horizons");
  ControllerComparison c;
  c.j_fo = j_fo;
  c.j_io = j_io;
  c.tracking_error_l1_fo = fo.tracking_error_l1;
  c.tracking_error_l1_io = io.tracking_error_l1;
  c.max_abs_input_fo = fo.max_abs_input;
  c.max_abs_input_io = io.max_abs_input;
  c.input_l1_fo = fo.input_l1;
  c.input_l1_io = io.input_l1;
  c.fo_lower_loss = j_fo < j_io;
  c.fo_lower_tracking_error = fo.tracking_error_l1 <= io.tracking_error_l1;
  c.fo_lower_peak_input = fo.max_abs_input <= io.max_abs_input;
  c.abs_error_fo.resize(fo.r.size());
  c.abs_error_io.resize(io.r.size());
  for (std::size_t k = 0; k < fo.r.size(); ++k) {
    c.abs_error_fo[k] = std::abs(fo.y_closed_loop[k] - fo.y_model[k]);
    c.abs_error_io[k] = std::abs(io.y_closed_loop[k] - io.y_model[k]);
  }
  return c;
}

}  // namespace frit
