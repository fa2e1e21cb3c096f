#include "frit/idfrit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frit/error.hpp"

namespace frit {

namespace {

constexpr double kHeadTolerance = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool well_scaled(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::abs(x) <= kOverflowGuard; });
}

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

const char* to_string(PenaltyReason reason) {
  switch (reason) {
    case PenaltyReason::kNone: return "none";
    case PenaltyReason::kNonInvertibleController: return "non_invertible_controller";
    case PenaltyReason::kFictitiousHeadZero: return "fictitious_head_zero";
    case PenaltyReason::kNonfiniteSignal: return "nonfinite_signal";
  }
  return "none";
}

ExperimentRecord::ExperimentRecord(Signal r0, Signal u0, Signal y0)
    : r0_(std::move(r0)), u0_(std::move(u0)), y0_(std::move(y0)) {
  if (r0_.size() != u0_.size() || r0_.size() != y0_.size())
    throw Error(ErrorCode::kDataMalformed, "r0, u0 and y0 must have equal lengths");
  if (!same_sample_time(r0_.sample_time(), u0_.sample_time()) ||
      !same_sample_time(r0_.sample_time(), y0_.sample_time()))
    throw Error(ErrorCode::kSampleTimeMismatch, "r0, u0 and y0 must share one sample time");
  if (!all_finite(r0_.samples()) || !all_finite(u0_.samples()) || !all_finite(y0_.samples()))
    throw Error(ErrorCode::kDataMalformed, "experiment data must be finite");
  if (r0_[0] == 0.0) throw Error(ErrorCode::kAssumptionViolated, "reference head must be nonzero");
}

std::vector<double> lower_toeplitz_solve(std::span<const double> column, std::span<const double> rhs) {
  if (column.size() != rhs.size()) throw Error(ErrorCode::kInvalidArgument, "Toeplitz solve: length mismatch");
  if (column.empty()) return {};
  if (std::abs(column[0]) < kHeadTolerance)
    throw Error(ErrorCode::kFictitiousHeadZero, "Toeplitz diagonal is zero");
  const std::size_t n = rhs.size();
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Extended accumulator: when C^-1 is unstable the column grows
    // exponentially and this sum cancels down from its size.
    long double acc = rhs[k];
    const double* c = column.data() + 1;
    const double* xr = x.data() + k;
    for (std::size_t tau = 0; tau < k; ++tau) acc -= static_cast<long double>(c[tau]) * *(--xr);
    x[k] = static_cast<double>(acc / column[0]);
  }
  return x;
}

std::vector<double> lower_toeplitz_multiply(std::span<const double> column, std::span<const double> x) {
  if (column.size() != x.size()) throw Error(ErrorCode::kInvalidArgument, "Toeplitz product: length mismatch");
  const std::size_t n = x.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t tau = 0; tau <= k; ++tau) acc += column[tau] * x[k - tau];
    y[k] = acc;
  }
  return y;
}

Signal fictitious_reference(const DiscreteTf& c, const ExperimentRecord& data) {
  const DiscreteTf inverse = invert(c);
  Signal part = simulate(inverse, data.u0());
  std::vector<double> r(part.samples().begin(), part.samples().end());
  const auto y0 = data.y0().samples();
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += y0[k];
  return Signal(std::move(r), data.sample_time());
}

Signal toeplitz_solve(const Signal& rt, const Signal& y0) {
  if (rt.size() != y0.size()) throw Error(ErrorCode::kInvalidArgument, "Toeplitz solve: length mismatch");
  return Signal(lower_toeplitz_solve(rt.samples(), y0.samples()), rt.sample_time());
}

Signal reconstruct_output(const Signal& r0, const Signal& t) {
  if (r0.size() != t.size()) throw Error(ErrorCode::kInvalidArgument, "reconstruction: length mismatch");
  return Signal(lower_toeplitz_multiply(r0.samples(), t.samples()), r0.sample_time());
}

double max_inverse_toeplitz_entry(std::span<const double> r0) {
  if (r0.empty()) return 0.0;
  // inv(R0) is lower-triangular Toeplitz too; its first column holds every entry.
  std::vector<double> unit(r0.size(), 0.0);
  unit[0] = 1.0;
  const std::vector<double> column = lower_toeplitz_solve(r0, unit);
  double gamma = 0.0;
  for (double v : column) gamma = std::max(gamma, std::abs(v));
  return gamma;
}

double inverse_toeplitz_l1(std::span<const double> r0) {
  if (r0.empty()) return 0.0;
  std::vector<double> unit(r0.size(), 0.0);
  unit[0] = 1.0;
  return l1(lower_toeplitz_solve(r0, unit));
}

namespace {

bool within(double value, double bound) {
  // slack for summation rounding only
  return value <= bound + 1e-12 * (1.0 + bound);
}

StabilityBoundReport make_bound_report(double gamma, double inverse_l1, double md_l1, std::span<const double> t,
                                       std::span<const double> epsilon) {
  StabilityBoundReport report;
  const double eps_l1 = l1(epsilon);
  report.gamma_r0 = gamma;
  report.t_l1 = l1(t);
  report.bound = std::abs(gamma) * eps_l1 + md_l1;
  report.satisfied = within(report.t_l1, report.bound);
  report.inverse_l1 = inverse_l1;
  report.induced_bound = inverse_l1 * eps_l1 + md_l1;
  report.induced_satisfied = within(report.t_l1, report.induced_bound);
  return report;
}

}  // namespace

StabilityBoundReport stability_bound_report(const ExperimentRecord& data, const DiscreteTf& md,
                                            std::span<const double> t, std::span<const double> epsilon) {
  if (t.size() != data.size() || epsilon.size() != data.size())
    throw Error(ErrorCode::kInvalidArgument, "bound report: length mismatch");
  const Signal md_impulse = impulse_response(md, data.horizon());
  const auto r0 = data.r0().samples();
  return make_bound_report(max_inverse_toeplitz_entry(r0), inverse_toeplitz_l1(r0), l1(md_impulse.samples()), t,
                           epsilon);
}

LossFunction::LossFunction(ExperimentRecord data, DiscreteTf reference_model, ControllerTemplate controller)
    : data_(std::move(data)), md_(std::move(reference_model)), controller_(controller) {
  if (!same_sample_time(md_.sample_time(), data_.sample_time()))
    throw Error(ErrorCode::kSampleTimeMismatch, "reference model and data use different sample times");
  if (!same_sample_time(controller_.sample_time, data_.sample_time()))
    throw Error(ErrorCode::kSampleTimeMismatch, "controller and data use different sample times");
  if (!is_bibo_stable(md_).stable) throw Error(ErrorCode::kInvalidArgument, "reference model must be BIBO stable");

  const Signal md_impulse = impulse_response(md_, data_.horizon());
  md_l1_ = l1(md_impulse.samples());
  model_output_ = lower_toeplitz_multiply(data_.r0().samples(), md_impulse.samples());
  gamma_r0_ = max_inverse_toeplitz_entry(data_.r0().samples());
  inverse_l1_ = inverse_toeplitz_l1(data_.r0().samples());
}

LossFunction::Evaluation LossFunction::evaluate(std::span<const double> theta) const {
  Evaluation e;
  auto penalize = [&e](PenaltyReason reason) {
    e.breakdown = {kPenalty, kNaN, kNaN, true, reason};
    return e;
  };

  std::optional<DiscreteTf> inverse;
  try {
    inverse = invert(realize_controller(theta, controller_));
  } catch (const Error& err) {
    if (err.code() == ErrorCode::kNonInvertible) return penalize(PenaltyReason::kNonInvertibleController);
    if (err.code() == ErrorCode::kInvalidArgument) return penalize(PenaltyReason::kNonfiniteSignal);
    throw;
  }

  e.r_tilde = simulate(inverse->realization(), data_.u0().samples());
  const auto y0 = data_.y0().samples();
  for (std::size_t k = 0; k < e.r_tilde.size(); ++k) e.r_tilde[k] += y0[k];
  if (!all_finite(e.r_tilde) || !well_scaled(e.r_tilde)) return penalize(PenaltyReason::kNonfiniteSignal);
  if (std::abs(e.r_tilde[0]) < kHeadTolerance) return penalize(PenaltyReason::kFictitiousHeadZero);

  e.t = lower_toeplitz_solve(e.r_tilde, y0);
  if (!all_finite(e.t) || !well_scaled(e.t)) return penalize(PenaltyReason::kNonfiniteSignal);

  e.y = lower_toeplitz_multiply(data_.r0().samples(), e.t);
  if (!all_finite(e.y) || !well_scaled(e.y)) return penalize(PenaltyReason::kNonfiniteSignal);

  e.epsilon.resize(e.y.size());
  for (std::size_t k = 0; k < e.y.size(); ++k) e.epsilon[k] = e.y[k] - model_output_[k];
  const double j = l1(e.epsilon);
  if (!std::isfinite(j)) return penalize(PenaltyReason::kNonfiniteSignal);
  e.breakdown = {j, j, l1(e.t), false, PenaltyReason::kNone};
  return e;
}

StabilityBoundReport LossFunction::bound_report(const Evaluation& e) const {
  if (e.breakdown.penalized) throw Error(ErrorCode::kInvalidArgument, "no stability bound for a penalized evaluation");
  return make_bound_report(gamma_r0_, inverse_l1_, md_l1_, e.t, e.epsilon);
}

LossBreakdown evaluate_loss(std::span<const double> theta, const ControllerTemplate& controller,
                            const ExperimentRecord& data, const DiscreteTf& md) {
  return LossFunction(data, md, controller)(theta);
}

}  // namespace frit
