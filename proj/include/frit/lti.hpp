#pragma once

#include <complex>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "frit/state_space.hpp"

namespace frit {

/// Real polynomial, coefficients stored highest degree first.
///
/// Leading coefficients that are exactly 0.0 are stripped on construction;
/// the zero polynomial is stored as a single 0.0.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs)
      : Polynomial(std::vector<double>(coeffs)) {}

  static Polynomial constant(double value) { return Polynomial({value}); }
  static Polynomial monomial(int degree, double coeff = 1.0);
  /// gain * prod (x - root)
  static Polynomial from_roots(std::span<const double> roots, double gain = 1.0);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coeffs() const { return coeffs_; }
  double leading() const { return coeffs_.front(); }
  double constant_term() const { return coeffs_.back(); }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> x) const;

  friend Polynomial operator+(const Polynomial& lhs, const Polynomial& rhs);
  friend Polynomial operator-(const Polynomial& lhs, const Polynomial& rhs);
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
  friend Polynomial operator*(double k, const Polynomial& p);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<double> coeffs_;
};

/// Sampled signal x_0..x_N on a uniform grid.
class Signal {
 public:
  Signal(std::vector<double> samples, double sample_time);

  std::span<const double> samples() const { return samples_; }
  double sample_time() const { return sample_time_; }
  std::size_t size() const { return samples_.size(); }
  double operator[](std::size_t k) const { return samples_[k]; }

 private:
  std::vector<double> samples_;
  double sample_time_;
};

/// Real zero/pole/gain form in s: gain * prod (s - z_i) / prod (s - p_i).
struct RealFactors {
  double gain = 1.0;
  std::vector<double> zeros;
  std::vector<double> poles;
};

/// Continuous-time rational transfer function with optional dead time.
///
/// Improper numerators are allowed (s^mu with mu >= 1 is one); Tustin maps
/// them to proper discrete systems. When the function was built from real
/// factors those are kept, so frequency responses and discretization do not
/// depend on the expanded coefficients.
class ContinuousTf {
 public:
  ContinuousTf(Polynomial num, Polynomial den, double dead_time = 0.0);
  static ContinuousTf from_factors(RealFactors factors, double dead_time = 0.0);
  static ContinuousTf gain(double k) { return ContinuousTf(Polynomial::constant(k), Polynomial::constant(1.0)); }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  double dead_time() const { return dead_time_; }
  const std::optional<RealFactors>& factors() const { return factors_; }
  bool is_proper() const { return num_.degree() <= den_.degree(); }

  /// G(jw), dead time included.
  std::complex<double> frequency_response(double w) const;

  ContinuousTf reciprocal() const;

  friend ContinuousTf operator*(const ContinuousTf& lhs, const ContinuousTf& rhs);
  friend ContinuousTf operator*(double k, const ContinuousTf& g);
  friend ContinuousTf operator+(const ContinuousTf& lhs, const ContinuousTf& rhs);

 private:
  Polynomial num_;
  Polynomial den_;
  double dead_time_ = 0.0;
  std::optional<RealFactors> factors_;
};

/// Proper discrete-time transfer function z^-delay * num(z) / den(z).
///
/// The denominator is kept monic. Every instance also carries a state-space
/// realization of num/den (delay excluded) that simulation and pole analysis
/// run on; composition operators build both forms side by side.
class DiscreteTf {
 public:
  DiscreteTf(Polynomial num, Polynomial den, double sample_time, int delay_samples = 0);
  static DiscreteTf gain(double k, double sample_time);
  /// Product of first-order sections (b0 z + b1)/(a0 z + a1) times `gain`.
  struct Section {
    double b0, b1, a0, a1;
  };
  static DiscreteTf from_sections(double gain, std::span<const Section> sections,
                                  double sample_time);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  double sample_time() const { return sample_time_; }
  int delay_samples() const { return delay_; }
  const StateSpace& realization() const { return ss_; }
  /// Direct feedthrough of the whole transfer function (0 when delayed).
  double feedthrough() const { return delay_ > 0 ? 0.0 : ss_.d; }
  bool is_biproper() const { return num_.degree() == den_.degree(); }

  /// G(z) from the realization, delay included.
  std::complex<double> evaluate(std::complex<double> z) const;
  /// Realization with the delay appended as shift-register states.
  StateSpace delayed_realization() const;

  friend DiscreteTf series(const DiscreteTf& first, const DiscreteTf& second);
  friend DiscreteTf parallel(const DiscreteTf& lhs, const DiscreteTf& rhs);
  friend DiscreteTf scaled(const DiscreteTf& g, double k);
  friend DiscreteTf feedback_unity(const DiscreteTf& p, const DiscreteTf& c);
  friend DiscreteTf invert(const DiscreteTf& g);

 private:
  DiscreteTf(Polynomial num, Polynomial den, double sample_time, int delay_samples,
             StateSpace ss);

  Polynomial num_;
  Polynomial den_;
  double sample_time_;
  int delay_;
  StateSpace ss_;
};

DiscreteTf series(const DiscreteTf& first, const DiscreteTf& second);
DiscreteTf parallel(const DiscreteTf& lhs, const DiscreteTf& rhs);
DiscreteTf scaled(const DiscreteTf& g, double k);
/// T = P C / (1 + P C). Delays are folded into the result, which has
/// delay_samples() == 0.
DiscreteTf feedback_unity(const DiscreteTf& p, const DiscreteTf& c);
/// 1/g. Requires |feedthrough| >= kInvertibilityTolerance and no delay.
DiscreteTf invert(const DiscreteTf& g);

inline constexpr double kInvertibilityTolerance = 1e-12;

/// Bilinear substitution s <- (2/ts)(z-1)/(z+1), no prewarping. Dead time is
/// rounded to whole samples.
DiscreteTf tustin(const ContinuousTf& g, double sample_time);

/// Causal response from zero initial conditions, same length as u.
Signal simulate(const DiscreteTf& g, const Signal& u);
/// g_0..g_n.
Signal impulse_response(const DiscreteTf& g, std::size_t n);

/// Poles of the realization, including delay_samples() poles at the origin.
std::vector<std::complex<double>> poles(const DiscreteTf& g);

struct StabilityMargin {
  bool stable;
  double margin;  // 1 - max |pole|
};
StabilityMargin is_bibo_stable(const DiscreteTf& g, double tol = 0.0);

/// Response of the unity-feedback loop (e = r - y, u = C e,
/// y = P u), co-simulated one sample at a time.
struct LoopTrace {
  std::vector<double> y;
  std::vector<double> u;
};
LoopTrace simulate_unity_loop(const DiscreteTf& p, const DiscreteTf& c,
                              std::span<const double> r);

bool same_sample_time(double a, double b);

}  // namespace frit
