#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "frit/idfrit.hpp"
#include "frit/swarm.hpp"

namespace frit {

using AnyTf = std::variant<ContinuousTf, DiscreteTf>;

/// Published figures a case is compared against.
struct PublishedResult {
  double j0 = 0.0;
  double j_star = 0.0;
  std::vector<double> theta_star;
};

struct BenchmarkCase {
  std::string name;
  AnyTf plant = ContinuousTf::gain(1.0);
  AnyTf reference_model = ContinuousTf::gain(1.0);
  double sample_time = 0.1;
  double sim_time = 100.0;
  std::vector<double> theta0;
  Bounds bounds;
  ControllerTemplate controller;
  double step_amplitude = 1.0;  // r0 is a step starting at k = 0
  PublishedResult published;

  /// N = round(sim_time / sample_time); signals hold N + 1 samples.
  std::size_t horizon() const;
  /// Continuous models are Tustin-discretized at sample_time.
  DiscreteTf discrete_plant() const;
  DiscreteTf discrete_reference_model() const;
  Signal reference_signal() const;
};

const std::vector<std::string>& builtin_case_names();
/// example1, example2, example3_io, example3_fo. Throws kUnknownName.
BenchmarkCase builtin_case(const std::string& name);

/// Closed-loop experiment with the data-collection controller C(theta0).
ExperimentRecord collect_data(const BenchmarkCase& bench);
ExperimentRecord collect_data(const DiscreteTf& plant, const DiscreteTf& controller, const Signal& r0);

struct ValidationReport {
  std::vector<std::complex<double>> closed_loop_poles;
  bool stable = false;
  double max_pole_magnitude = 0.0;
  double tracking_error_l1 = 0.0;  // || T r0 - M_D r0 ||_1
  double max_abs_input = 0.0;
  double input_l1 = 0.0;
  std::vector<double> r;
  std::vector<double> y_model;
  std::vector<double> y_closed_loop;
  std::vector<double> u;
};

/// Poles closer than this to the unit circle count as marginal, not stable.
/// Eigenvalues of the closed-loop realizations are only accurate to about
/// 1e-11 near |z| = 1, and Tustin maps an integer derivative to a pole at -1.
inline constexpr double kMarginalPoleTolerance = 1e-9;

/// Checks a parameter vector against the true plant. Instability is reported,
/// not thrown.
ValidationReport validate(const DiscreteTf& plant, const DiscreteTf& reference_model,
                          const ControllerTemplate& controller, std::span<const double> theta,
                          const Signal& r);
ValidationReport validate(const BenchmarkCase& bench, std::span<const double> theta);

struct ControllerComparison {
  double j_fo = 0.0;
  double j_io = 0.0;
  double tracking_error_l1_fo = 0.0;
  double tracking_error_l1_io = 0.0;
  double max_abs_input_fo = 0.0;
  double max_abs_input_io = 0.0;
  double input_l1_fo = 0.0;
  double input_l1_io = 0.0;
  bool fo_lower_loss = false;
  bool fo_lower_tracking_error = false;
  bool fo_lower_peak_input = false;
  // Per-sample traces for plotting.
  std::vector<double> abs_error_fo;
  std::vector<double> abs_error_io;
};

ControllerComparison compare_fo_io(const ValidationReport& fo, double j_fo, const ValidationReport& io,
                                   double j_io);

}  // namespace frit
