#include "frit/folib.hpp"

#include <cmath>

#include "frit/error.hpp"

namespace frit {

FopidParams FopidParams::from_vector(std::span<const double> theta) {
  if (theta.size() != 5) throw Error(ErrorCode::kInvalidArgument, "FOPID parameter vector must have 5 entries");
  return {theta[0], theta[1], theta[2], theta[3], theta[4]};
}

IopidParams IopidParams::from_vector(std::span<const double> theta) {
  if (theta.size() != 3) throw Error(ErrorCode::kInvalidArgument, "IOPID parameter vector must have 3 entries");
  return {theta[0], theta[1], theta[2]};
}

void OustaloupConfig::validate() const {
  if (order < 1) throw Error(ErrorCode::kInvalidArgument, "Oustaloup order must be >= 1");
  if (!(w_b > 0.0) || !(w_h > w_b) || !std::isfinite(w_h))
    throw Error(ErrorCode::kInvalidArgument, "Oustaloup band must satisfy 0 < w_b < w_h");
}

const char* to_string(ControllerKind kind) {
  return kind == ControllerKind::kFopid ? "fopid" : "iopid";
}

ControllerKind controller_kind_from_string(const std::string& name) {
  if (name == "fopid" || name == "FOPID") return ControllerKind::kFopid;
  if (name == "iopid" || name == "IOPID") return ControllerKind::kIopid;
  throw Error(ErrorCode::kInvalidArgument, "unknown controller kind '" + name + "'");
}

ContinuousTf oustaloup(double alpha, const OustaloupConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(alpha)) throw Error(ErrorCode::kInvalidArgument, "non-finite operator order");
  if (alpha < 0.0) return oustaloup(-alpha, cfg).reciprocal();

  const double whole = std::floor(alpha);
  const double frac = alpha - whole;
  RealFactors f;
  f.zeros.assign(static_cast<std::size_t>(whole), 0.0);
  if (frac > 0.0) {
    const int pairs = 2 * cfg.order + 1;
    const double ratio = cfg.w_h / cfg.w_b;
    const double center = std::sqrt(cfg.w_b * cfg.w_h);
    std::complex<double> at_center = 1.0;
    for (int k = 1; k <= pairs; ++k) {
      const double zero = cfg.w_b * std::pow(ratio, (k - 1 + 0.5 * (1.0 - frac)) / pairs);
      const double pole = cfg.w_b * std::pow(ratio, (k - 1 + 0.5 * (1.0 + frac)) / pairs);
      f.zeros.push_back(-zero);
      f.poles.push_back(-pole);
      at_center *= std::complex<double>(zero, center) / std::complex<double>(pole, center);
    }
    // |approx(j center)| == center^frac
    f.gain = std::pow(center, frac) / std::abs(at_center);
  }
  return ContinuousTf::from_factors(std::move(f));
}

ContinuousTf fopid_continuous(const FopidParams& p, const OustaloupConfig& cfg) {
  ContinuousTf sum = ContinuousTf::gain(p.kfp);
  if (p.kfi != 0.0) sum = sum + p.kfi * oustaloup(-p.lambda, cfg);
  if (p.kfd != 0.0) sum = sum + p.kfd * oustaloup(p.mu, cfg);
  return sum;
}

namespace {

// Sums the non-elided terms; an empty sum is the zero controller.
class TermSum {
 public:
  explicit TermSum(double ts) : ts_(ts) {}

  void add(const DiscreteTf& term) { sum_ = sum_ ? parallel(*sum_, term) : term; }

  DiscreteTf result() const { return sum_ ? *sum_ : DiscreteTf::gain(0.0, ts_); }

 private:
  double ts_;
  std::optional<DiscreteTf> sum_;
};

}  // namespace

DiscreteTf realize_fopid(const FopidParams& p, const ControllerTemplate& t) {
  if (t.kind != ControllerKind::kFopid) throw Error(ErrorCode::kInvalidArgument, "template is not FOPID");
  const double ts = t.sample_time;
  // Tustin is a substitution, so discretizing each term and summing in z is
  // the same rational function as discretizing the common-denominator sum.
  TermSum sum(ts);
  if (p.kfp != 0.0) sum.add(DiscreteTf::gain(p.kfp, ts));
  if (p.kfi != 0.0) sum.add(tustin(p.kfi * oustaloup(-p.lambda, t.oustaloup), ts));
  if (p.kfd != 0.0) sum.add(tustin(p.kfd * oustaloup(p.mu, t.oustaloup), ts));
  return sum.result();
}

DiscreteTf realize_iopid(const IopidParams& p, const ControllerTemplate& t) {
  if (t.kind != ControllerKind::kIopid) throw Error(ErrorCode::kInvalidArgument, "template is not IOPID");
  const double ts = t.sample_time;
  TermSum sum(ts);
  if (p.kp != 0.0) sum.add(DiscreteTf::gain(p.kp, ts));
  if (p.ki != 0.0) sum.add(tustin(ContinuousTf::from_factors({p.ki, {}, {0.0}}), ts));
  if (p.kd != 0.0) sum.add(tustin(ContinuousTf::from_factors({p.kd, {0.0}, {}}), ts));
  return sum.result();
}

DiscreteTf realize_controller(std::span<const double> theta, const ControllerTemplate& t) {
  if (theta.size() != t.dimension())
    throw Error(ErrorCode::kInvalidArgument, "parameter vector has " + std::to_string(theta.size()) +
                                                 " entries, controller expects " +
                                                 std::to_string(t.dimension()));
  for (double v : theta)
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite controller parameter");
  if (t.kind == ControllerKind::kFopid) return realize_fopid(FopidParams::from_vector(theta), t);
  return realize_iopid(IopidParams::from_vector(theta), t);
}

}  // namespace frit
