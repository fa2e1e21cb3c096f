#pragma once

#include <span>
#include <vector>

#include "frit/folib.hpp"
#include "frit/lti.hpp"

namespace frit {

/// One closed-loop experiment: reference r0, input u0, output y0 on k = 0..N.
///
/// Construction enforces equal lengths and sample times (kDataMalformed /
/// kSampleTimeMismatch), finite samples, and r0[0] != 0
/// (kAssumptionViolated): a zero head makes the reference convolution matrix
/// singular.
class ExperimentRecord {
 public:
  ExperimentRecord(Signal r0, Signal u0, Signal y0);

  const Signal& r0() const { return r0_; }
  const Signal& u0() const { return u0_; }
  const Signal& y0() const { return y0_; }
  std::size_t horizon() const { return r0_.size() - 1; }
  std::size_t size() const { return r0_.size(); }
  double sample_time() const { return r0_.sample_time(); }

 private:
  Signal r0_;
  Signal u0_;
  Signal y0_;
};

enum class PenaltyReason { kNone, kNonInvertibleController, kFictitiousHeadZero, kNonfiniteSignal };

const char* to_string(PenaltyReason reason);

/// Flat loss returned for parameters that cannot be evaluated or whose
/// reconstructed closed loop diverges.
inline constexpr double kPenalty = 1e12;
/// Any intermediate sample above this magnitude counts as non-finite.
inline constexpr double kOverflowGuard = 1e30;

struct LossBreakdown {
  double j = 0.0;
  double epsilon_l1 = 0.0;  // NaN when the pipeline stopped early
  double t_l1 = 0.0;        // NaN when the pipeline stopped early
  bool penalized = false;
  PenaltyReason penalty_reason = PenaltyReason::kNone;
};

struct StabilityBoundReport {
  double gamma_r0 = 0.0;  // largest-magnitude entry of inv(R0)
  double bound = 0.0;     // |gamma_r0| * ||eps||_1 + ||m_D||_1
  double t_l1 = 0.0;
  bool satisfied = false;
  // Same inequality with the induced l1 norm of inv(R0) (its column abs sum)
  // in place of gamma_r0. Reported alongside; `satisfied` does not use it.
  double inverse_l1 = 0.0;
  double induced_bound = 0.0;
  bool induced_satisfied = false;
};

// Lower-triangular Toeplitz kernels; `column` is the first column.
std::vector<double> lower_toeplitz_solve(std::span<const double> column, std::span<const double> rhs);
std::vector<double> lower_toeplitz_multiply(std::span<const double> column, std::span<const double> x);

/// r~ = C^-1 u0 + y0. Throws kNonInvertible when C has no feedthrough.
Signal fictitious_reference(const DiscreteTf& c, const ExperimentRecord& data);

/// t with y0 = R~ t, R~ the lower-triangular Toeplitz matrix of rt.
/// Throws kFictitiousHeadZero when |rt[0]| < 1e-12.
Signal toeplitz_solve(const Signal& rt, const Signal& y0);

/// R0 t: the closed-loop response to r0 rebuilt from the impulse response t.
Signal reconstruct_output(const Signal& r0, const Signal& t);

/// Largest-magnitude entry of inv(R0), from its generating column.
double max_inverse_toeplitz_entry(std::span<const double> r0);
/// Induced l1 norm of inv(R0): the abs sum of its generating column.
double inverse_toeplitz_l1(std::span<const double> r0);

StabilityBoundReport stability_bound_report(const ExperimentRecord& data, const DiscreteTf& md,
                                            std::span<const double> t, std::span<const double> epsilon);

/// Data-only model-matching loss J(theta) = || R0 t(theta) - R0 m_D ||_1.
///
/// Holds everything that does not depend on theta (R0 m_D, ||m_D||_1 and
/// gamma_r0), so repeated evaluation during the search only pays for the
/// controller inverse and two Toeplitz products. Evaluation is const and
/// reentrant.
class LossFunction {
 public:
  LossFunction(ExperimentRecord data, DiscreteTf reference_model, ControllerTemplate controller);

  struct Evaluation {
    LossBreakdown breakdown;
    std::vector<double> r_tilde;
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> epsilon;
  };

  LossBreakdown operator()(std::span<const double> theta) const { return evaluate(theta).breakdown; }
  Evaluation evaluate(std::span<const double> theta) const;
  /// Only meaningful for non-penalized evaluations.
  StabilityBoundReport bound_report(const Evaluation& e) const;

  const ExperimentRecord& data() const { return data_; }
  const DiscreteTf& reference_model() const { return md_; }
  const ControllerTemplate& controller() const { return controller_; }
  std::span<const double> model_output() const { return model_output_; }
  double md_l1() const { return md_l1_; }
  double gamma_r0() const { return gamma_r0_; }
  double inverse_l1() const { return inverse_l1_; }

 private:
  ExperimentRecord data_;
  DiscreteTf md_;
  ControllerTemplate controller_;
  std::vector<double> model_output_;  // R0 m_D
  double md_l1_ = 0.0;
  double gamma_r0_ = 0.0;
  double inverse_l1_ = 0.0;
};

LossBreakdown evaluate_loss(std::span<const double> theta, const ControllerTemplate& controller,
                            const ExperimentRecord& data, const DiscreteTf& md);

}  // namespace frit
