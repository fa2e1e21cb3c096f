#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "frit/lti.hpp"

namespace frit {

/// C(s) = kfp + kfi s^-lambda + kfd s^mu. Vector order [kfp kfi lambda kfd mu].
struct FopidParams {
  double kfp = 0.0;
  double kfi = 0.0;
  double lambda = 1.0;
  double kfd = 0.0;
  double mu = 1.0;

  static FopidParams from_vector(std::span<const double> theta);
  std::array<double, 5> to_vector() const { return {kfp, kfi, lambda, kfd, mu}; }
};

/// C(s) = kp + ki/s + kd s. Vector order [kp ki kd].
struct IopidParams {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;

  static IopidParams from_vector(std::span<const double> theta);
  std::array<double, 3> to_vector() const { return {kp, ki, kd}; }
};

/// Recursive-filter settings: 2*order+1 zero/pole pairs spread over [w_b, w_h] rad/s.
struct OustaloupConfig {
  int order = 5;
  double w_b = 1e-6;
  double w_h = 1e3;

  void validate() const;
};

enum class ControllerKind { kFopid, kIopid };

const char* to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& name);

struct ControllerTemplate {
  ControllerKind kind = ControllerKind::kFopid;
  OustaloupConfig oustaloup;  // unused for IOPID
  double sample_time = 0.1;

  std::size_t dimension() const { return kind == ControllerKind::kFopid ? 5 : 3; }
};

/// Band-limited rational approximation of s^alpha.
///
/// The integer part of alpha is applied exactly as a power of s; only the
/// fractional part goes through the recursive filter, so alpha = 1 gives s
/// itself. Negative alpha returns the reciprocal of the positive case. The
/// result keeps its real zeros and poles (see ContinuousTf::factors).
ContinuousTf oustaloup(double alpha, const OustaloupConfig& cfg);

/// Continuous FOPID after the fractional operators are approximated, summed
/// over a common denominator. May be improper when kfd != 0 and mu >= 1.
ContinuousTf fopid_continuous(const FopidParams& p, const OustaloupConfig& cfg);

/// Tustin-discretized, Oustaloup-approximated FOPID. Terms whose gain is
/// exactly 0.0 are left out, along with their order.
DiscreteTf realize_fopid(const FopidParams& p, const ControllerTemplate& t);

/// Tustin-discretized integer PID, discretized term by term.
DiscreteTf realize_iopid(const IopidParams& p, const ControllerTemplate& t);

/// Dispatches on t.kind; theta must have t.dimension() entries.
DiscreteTf realize_controller(std::span<const double> theta, const ControllerTemplate& t);

}  // namespace frit
