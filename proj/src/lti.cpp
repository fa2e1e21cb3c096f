#include "frit/lti.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frit/error.hpp"

namespace frit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kImproper: return "improper transfer function";
    case ErrorCode::kSampleTimeMismatch: return "sample time mismatch";
    case ErrorCode::kAlgebraicLoop: return "algebraic loop";
    case ErrorCode::kNonInvertible: return "non-invertible controller";
    case ErrorCode::kFictitiousHeadZero: return "fictitious reference head is zero";
    case ErrorCode::kAssumptionViolated: return "assumption violated";
    case ErrorCode::kDataMalformed: return "malformed data";
    case ErrorCode::kNumerical: return "numerical failure";
    case ErrorCode::kUnknownName: return "unknown name";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  auto first = std::find_if(coeffs_.begin(), coeffs_.end(), [](double c) { return c != 0.0; });
  coeffs_.erase(coeffs_.begin(), first);
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Polynomial Polynomial::monomial(int degree, double coeff) {
  if (degree < 0) throw Error(ErrorCode::kInvalidArgument, "negative monomial degree");
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  c[0] = coeff;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::from_roots(std::span<const double> roots, double gain) {
  std::vector<double> c{gain};
  for (double r : roots) {
    c.push_back(0.0);
    for (std::size_t i = c.size() - 1; i > 0; --i) c[i] -= r * c[i - 1];
  }
  return Polynomial(std::move(c));
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (double c : coeffs_) acc = acc * x + c;
  return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> x) const {
  std::complex<double> acc = 0.0;
  for (double c : coeffs_) acc = acc * x + c;
  return acc;
}

Polynomial operator+(const Polynomial& lhs, const Polynomial& rhs) {
  const auto& big = lhs.coeffs_.size() >= rhs.coeffs_.size() ? lhs.coeffs_ : rhs.coeffs_;
  const auto& small = lhs.coeffs_.size() >= rhs.coeffs_.size() ? rhs.coeffs_ : lhs.coeffs_;
  std::vector<double> out = big;
  const std::size_t off = big.size() - small.size();
  for (std::size_t i = 0; i < small.size(); ++i) out[off + i] += small[i];
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& lhs, const Polynomial& rhs) { return lhs + (-1.0) * rhs; }

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  std::vector<double> out(lhs.coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < lhs.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += lhs.coeffs_[i] * rhs.coeffs_[j];
  return Polynomial(std::move(out));
}

Polynomial operator*(double k, const Polynomial& p) {
  std::vector<double> out = p.coeffs_;
  for (double& c : out) c *= k;
  return Polynomial(std::move(out));
}

// -------------------------------------------------------------------- Signal

Signal::Signal(std::vector<double> samples, double sample_time)
    : samples_(std::move(samples)), sample_time_(sample_time) {
  if (samples_.empty()) throw Error(ErrorCode::kInvalidArgument, "signal must hold at least one sample");
  if (!(sample_time_ > 0.0) || !std::isfinite(sample_time_))
    throw Error(ErrorCode::kInvalidArgument, "sample time must be positive");
}

bool same_sample_time(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

// -------------------------------------------------------------- ContinuousTf

ContinuousTf::ContinuousTf(Polynomial num, Polynomial den, double dead_time)
    : num_(std::move(num)), den_(std::move(den)), dead_time_(dead_time) {
  if (den_.is_zero()) throw Error(ErrorCode::kInvalidArgument, "zero denominator");
  if (!(dead_time_ >= 0.0) || !std::isfinite(dead_time_))
    throw Error(ErrorCode::kInvalidArgument, "dead time must be finite and non-negative");
}

ContinuousTf ContinuousTf::from_factors(RealFactors factors, double dead_time) {
  ContinuousTf g(Polynomial::from_roots(factors.zeros, factors.gain),
                 Polynomial::from_roots(factors.poles), dead_time);
  g.factors_ = std::move(factors);
  return g;
}

std::complex<double> ContinuousTf::frequency_response(double w) const {
  const std::complex<double> s(0.0, w);
  std::complex<double> value;
  if (factors_) {
    value = factors_->gain;
    for (double z : factors_->zeros) value *= (s - z);
    for (double p : factors_->poles) value /= (s - p);
  } else {
    value = num_(s) / den_(s);
  }
  if (dead_time_ > 0.0) value *= std::exp(-s * dead_time_);
  return value;
}

ContinuousTf ContinuousTf::reciprocal() const {
  if (num_.is_zero()) throw Error(ErrorCode::kInvalidArgument, "reciprocal of zero transfer function");
  if (dead_time_ > 0.0) throw Error(ErrorCode::kInvalidArgument, "reciprocal of a dead-time system is not causal");
  ContinuousTf g(den_, num_);
  if (factors_) g.factors_ = RealFactors{1.0 / factors_->gain, factors_->poles, factors_->zeros};
  return g;
}

ContinuousTf operator*(const ContinuousTf& lhs, const ContinuousTf& rhs) {
  ContinuousTf g(lhs.num_ * rhs.num_, lhs.den_ * rhs.den_, lhs.dead_time_ + rhs.dead_time_);
  if (lhs.factors_ && rhs.factors_) {
    RealFactors f{lhs.factors_->gain * rhs.factors_->gain, lhs.factors_->zeros, lhs.factors_->poles};
    f.zeros.insert(f.zeros.end(), rhs.factors_->zeros.begin(), rhs.factors_->zeros.end());
    f.poles.insert(f.poles.end(), rhs.factors_->poles.begin(), rhs.factors_->poles.end());
    g.factors_ = std::move(f);
  }
  return g;
}

ContinuousTf operator*(double k, const ContinuousTf& g) {
  ContinuousTf out(k * g.num_, g.den_, g.dead_time_);
  if (g.factors_) {
    out.factors_ = g.factors_;
    out.factors_->gain *= k;
  }
  return out;
}

ContinuousTf operator+(const ContinuousTf& lhs, const ContinuousTf& rhs) {
  if (lhs.dead_time_ != rhs.dead_time_)
    throw Error(ErrorCode::kInvalidArgument, "sum of transfer functions with different dead times");
  return ContinuousTf(lhs.num_ * rhs.den_ + rhs.num_ * lhs.den_, lhs.den_ * rhs.den_, lhs.dead_time_);
}

// ---------------------------------------------------------------- DiscreteTf

namespace {

void check_sample_time(double ts) {
  if (!(ts > 0.0) || !std::isfinite(ts)) throw Error(ErrorCode::kInvalidArgument, "sample time must be positive");
}

void require_same_sample_time(double a, double b) {
  if (!same_sample_time(a, b))
    throw Error(ErrorCode::kSampleTimeMismatch,
                "sample time mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

// num/den/ss with the delay moved into the rational part.
struct Folded {
  Polynomial num;
  Polynomial den;
  StateSpace ss;
};

Folded fold_delay(const DiscreteTf& g) {
  const int d = g.delay_samples();
  if (d == 0) return {g.num(), g.den(), g.realization()};
  return {g.num(), g.den() * Polynomial::monomial(d), g.delayed_realization()};
}

}  // namespace

DiscreteTf::DiscreteTf(Polynomial num, Polynomial den, double sample_time, int delay_samples)
    : sample_time_(sample_time), delay_(delay_samples) {
  check_sample_time(sample_time);
  if (delay_samples < 0) throw Error(ErrorCode::kInvalidArgument, "negative delay");
  if (den.is_zero()) throw Error(ErrorCode::kInvalidArgument, "zero denominator");
  if (num.degree() > den.degree()) throw Error(ErrorCode::kImproper, "improper discrete transfer function");
  const double lead = den.leading();
  num_ = (1.0 / lead) * num;
  den_ = (1.0 / lead) * den;
  ss_ = StateSpace::from_polynomials(num_, den_);
}

DiscreteTf::DiscreteTf(Polynomial num, Polynomial den, double sample_time, int delay_samples,
                       StateSpace ss)
    : sample_time_(sample_time), delay_(delay_samples), ss_(std::move(ss)) {
  if (den.is_zero()) throw Error(ErrorCode::kNumerical, "composition produced a zero denominator");
  const double lead = den.leading();
  num_ = (1.0 / lead) * num;
  den_ = (1.0 / lead) * den;
}

DiscreteTf DiscreteTf::gain(double k, double sample_time) {
  return DiscreteTf(Polynomial::constant(k), Polynomial::constant(1.0), sample_time);
}

DiscreteTf DiscreteTf::from_sections(double gain, std::span<const Section> sections,
                                     double sample_time) {
  check_sample_time(sample_time);
  Polynomial num = Polynomial::constant(gain);
  Polynomial den = Polynomial::constant(1.0);
  StateSpace ss = StateSpace::gain(gain);
  for (const Section& s : sections) {
    num = num * Polynomial({s.b0, s.b1});
    den = den * Polynomial({s.a0, s.a1});
    ss = series(ss, StateSpace::first_order(s.b0, s.b1, s.a0, s.a1));
  }
  return DiscreteTf(std::move(num), std::move(den), sample_time, 0, std::move(ss));
}

std::complex<double> DiscreteTf::evaluate(std::complex<double> z) const {
  return transfer_at(ss_, z) * std::pow(z, -delay_);
}

StateSpace DiscreteTf::delayed_realization() const {
  if (delay_ == 0) return ss_;
  return frit::series(ss_, StateSpace::delay(delay_));
}

DiscreteTf series(const DiscreteTf& first, const DiscreteTf& second) {
  require_same_sample_time(first.sample_time_, second.sample_time_);
  return DiscreteTf(first.num_ * second.num_, first.den_ * second.den_, first.sample_time_,
                    first.delay_ + second.delay_, series(first.ss_, second.ss_));
}

DiscreteTf parallel(const DiscreteTf& lhs, const DiscreteTf& rhs) {
  require_same_sample_time(lhs.sample_time_, rhs.sample_time_);
  if (lhs.delay_ == rhs.delay_) {
    return DiscreteTf(lhs.num_ * rhs.den_ + rhs.num_ * lhs.den_, lhs.den_ * rhs.den_,
                      lhs.sample_time_, lhs.delay_, parallel(lhs.ss_, rhs.ss_));
  }
  Folded l = fold_delay(lhs);
  Folded r = fold_delay(rhs);
  return DiscreteTf(l.num * r.den + r.num * l.den, l.den * r.den, lhs.sample_time_, 0,
                    parallel(l.ss, r.ss));
}

DiscreteTf scaled(const DiscreteTf& g, double k) {
  return DiscreteTf(k * g.num_, g.den_, g.sample_time_, g.delay_, scaled(g.ss_, k));
}

DiscreteTf feedback_unity(const DiscreteTf& p, const DiscreteTf& c) {
  require_same_sample_time(p.sample_time_, c.sample_time_);
  const DiscreteTf loop = series(c, p);
  Folded f = fold_delay(loop);
  if (std::abs(1.0 + f.ss.d) <= 1e-12)
    throw Error(ErrorCode::kAlgebraicLoop, "algebraic loop: 1 + P(inf) C(inf) = 0");
  Polynomial den = f.den + f.num;
  if (den.degree() < f.num.degree())
    throw Error(ErrorCode::kAlgebraicLoop, "algebraic loop: closed-loop denominator loses degree");
  return DiscreteTf(f.num, std::move(den), p.sample_time_, 0, unity_feedback(f.ss));
}

DiscreteTf invert(const DiscreteTf& g) {
  if (g.delay_ != 0 || std::abs(g.ss_.d) < kInvertibilityTolerance)
    throw Error(ErrorCode::kNonInvertible, "non-invertible controller");
  return DiscreteTf(g.den_, g.num_, g.sample_time_, 0, inverse(g.ss_));
}

// ------------------------------------------------------------------ tustin

namespace {

// sum_i p_i c^i (z-1)^i (z+1)^(n-i), p_i the coefficient of s^i.
Polynomial bilinear_map(const Polynomial& p, double c, int n) {
  const auto coeffs = p.coeffs();
  const int deg = p.degree();
  Polynomial out;
  const Polynomial zm1({1.0, -1.0});
  const Polynomial zp1({1.0, 1.0});
  for (int i = 0; i <= deg; ++i) {
    const double pi = coeffs[static_cast<std::size_t>(deg - i)];
    if (pi == 0.0) continue;
    Polynomial term = Polynomial::constant(pi * std::pow(c, i));
    for (int k = 0; k < i; ++k) term = term * zm1;
    for (int k = 0; k < n - i; ++k) term = term * zp1;
    out = out + term;
  }
  return out;
}

}  // namespace

DiscreteTf tustin(const ContinuousTf& g, double sample_time) {
  check_sample_time(sample_time);
  const int delay = static_cast<int>(std::lround(g.dead_time() / sample_time));
  const double c = 2.0 / sample_time;

  if (const auto& f = g.factors()) {
    // s - r  ->  ((c - r) z - (c + r)) / (z + 1)
    std::vector<DiscreteTf::Section> sections;
    const std::size_t nz = f->zeros.size();
    const std::size_t np = f->poles.size();
    const std::size_t count = std::max(nz, np);
    for (std::size_t i = 0; i < count; ++i) {
      DiscreteTf::Section s{1.0, 1.0, 1.0, 1.0};
      if (i < nz) {
        s.b0 = c - f->zeros[i];
        s.b1 = -(c + f->zeros[i]);
      }
      if (i < np) {
        s.a0 = c - f->poles[i];
        s.a1 = -(c + f->poles[i]);
        if (s.a0 == 0.0) throw Error(ErrorCode::kImproper, "improper discretization");
      }
      sections.push_back(s);
    }
    DiscreteTf d = DiscreteTf::from_sections(f->gain, sections, sample_time);
    if (delay == 0) return d;
    return series(d, DiscreteTf(Polynomial::constant(1.0), Polynomial::constant(1.0), sample_time, delay));
  }

  const int n = std::max(g.num().degree(), g.den().degree());
  Polynomial num = bilinear_map(g.num(), c, n);
  Polynomial den = bilinear_map(g.den(), c, n);
  if (den.is_zero() || den.degree() < num.degree())
    throw Error(ErrorCode::kImproper, "improper discretization");
  return DiscreteTf(std::move(num), std::move(den), sample_time, delay);
}

// ------------------------------------------------------------- time domain

Signal simulate(const DiscreteTf& g, const Signal& u) {
  require_same_sample_time(g.sample_time(), u.sample_time());
  std::vector<double> y = simulate(g.realization(), u.samples());
  const auto d = static_cast<std::size_t>(g.delay_samples());
  if (d > 0) {
    const std::size_t shift = std::min(d, y.size());
    std::move_backward(y.begin(), y.end() - static_cast<std::ptrdiff_t>(shift), y.end());
    std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(shift), 0.0);
  }
  return Signal(std::move(y), u.sample_time());
}

Signal impulse_response(const DiscreteTf& g, std::size_t n) {
  std::vector<double> delta(n + 1, 0.0);
  delta[0] = 1.0;
  return simulate(g, Signal(std::move(delta), g.sample_time()));
}

std::vector<std::complex<double>> poles(const DiscreteTf& g) {
  auto p = eigenvalues(g.realization());
  p.insert(p.end(), static_cast<std::size_t>(g.delay_samples()), std::complex<double>(0.0, 0.0));
  return p;
}

StabilityMargin is_bibo_stable(const DiscreteTf& g, double tol) {
  double max_mag = 0.0;
  for (const auto& p : poles(g)) max_mag = std::max(max_mag, std::abs(p));
  return {max_mag < 1.0 - tol, 1.0 - max_mag};
}

LoopTrace simulate_unity_loop(const DiscreteTf& p, const DiscreteTf& c, std::span<const double> r) {
  require_same_sample_time(p.sample_time(), c.sample_time());
  const StateSpace ps = p.delayed_realization();
  const StateSpace cs = c.delayed_realization();
  const double loop_gain = 1.0 + ps.d * cs.d;
  if (std::abs(loop_gain) <= 1e-12) throw Error(ErrorCode::kAlgebraicLoop, "algebraic loop in unity feedback");

  Eigen::VectorXd xp = Eigen::VectorXd::Zero(ps.order());
  Eigen::VectorXd xc = Eigen::VectorXd::Zero(cs.order());
  Eigen::VectorXd next;
  LoopTrace trace;
  trace.y.resize(r.size());
  trace.u.resize(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double plant_free = ps.order() ? ps.c.dot(xp) : 0.0;
    const double ctrl_free = cs.order() ? cs.c.dot(xc) : 0.0;
    const double y = (plant_free + ps.d * (ctrl_free + cs.d * r[k])) / loop_gain;
    const double e = r[k] - y;
    const double u = ctrl_free + cs.d * e;
    trace.y[k] = y;
    trace.u[k] = u;
    if (cs.order()) {
      next.noalias() = cs.a * xc;
      next += cs.b * e;
      xc.swap(next);
    }
    if (ps.order()) {
      next.noalias() = ps.a * xp;
      next += ps.b * u;
      xp.swap(next);
    }
  }
  return trace;
}

}  // namespace frit
