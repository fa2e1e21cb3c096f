#include "frit/state_space.hpp"

#include <cmath>

#include "frit/error.hpp"
#include "frit/lti.hpp"

namespace frit {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

StateSpace StateSpace::gain(double k) {
  StateSpace ss;
  ss.a.resize(0, 0);
  ss.b.resize(0);
  ss.c.resize(0);
  ss.d = k;
  return ss;
}

StateSpace StateSpace::from_polynomials(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw Error(ErrorCode::kInvalidArgument, "zero denominator");
  const int n = den.degree();
  if (num.degree() > n) throw Error(ErrorCode::kImproper, "improper transfer function");

  const double lead = den.leading();
  std::vector<double> a(den.coeffs().begin(), den.coeffs().end());
  for (double& v : a) v /= lead;
  std::vector<double> b(static_cast<std::size_t>(n + 1), 0.0);
  const auto nc = num.coeffs();
  std::copy(nc.begin(), nc.end(), b.end() - static_cast<std::ptrdiff_t>(nc.size()));
  for (double& v : b) v /= lead;

  StateSpace ss;
  ss.a = MatrixXd::Zero(n, n);
  ss.b = VectorXd::Zero(n);
  ss.c = RowVectorXd::Zero(n);
  ss.d = b[0];
  for (int i = 0; i < n; ++i) {
    ss.a(i, 0) = -a[i + 1];
    if (i + 1 < n) ss.a(i, i + 1) = 1.0;
    ss.b(i) = b[i + 1] - a[i + 1] * b[0];
  }
  if (n > 0) ss.c(0) = 1.0;
  return ss;
}

StateSpace StateSpace::first_order(double b0, double b1, double a0, double a1) {
  if (a0 == 0.0) throw Error(ErrorCode::kImproper, "section denominator has no z term");
  StateSpace ss;
  const double pole = -a1 / a0;
  ss.d = b0 / a0;
  ss.a = MatrixXd::Constant(1, 1, pole);
  ss.b = VectorXd::Constant(1, b1 / a0 + pole * ss.d);
  ss.c = RowVectorXd::Constant(1, 1.0);
  return ss;
}

StateSpace StateSpace::delay(int n) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "negative delay");
  if (n == 0) return gain(1.0);
  StateSpace ss;
  ss.a = MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) ss.a(i, i - 1) = 1.0;
  ss.b = VectorXd::Zero(n);
  ss.b(0) = 1.0;
  ss.c = RowVectorXd::Zero(n);
  ss.c(n - 1) = 1.0;
  ss.d = 0.0;
  return ss;
}

StateSpace series(const StateSpace& first, const StateSpace& second) {
  const Index n1 = first.order();
  const Index n2 = second.order();
  StateSpace out;
  out.a = MatrixXd::Zero(n1 + n2, n1 + n2);
  out.a.topLeftCorner(n1, n1) = first.a;
  out.a.bottomRightCorner(n2, n2) = second.a;
  out.a.bottomLeftCorner(n2, n1) = second.b * first.c;
  out.b.resize(n1 + n2);
  out.b.head(n1) = first.b;
  out.b.tail(n2) = second.b * first.d;
  out.c.resize(n1 + n2);
  out.c.head(n1) = second.d * first.c;
  out.c.tail(n2) = second.c;
  out.d = second.d * first.d;
  return out;
}

StateSpace parallel(const StateSpace& lhs, const StateSpace& rhs) {
  const Index n1 = lhs.order();
  const Index n2 = rhs.order();
  StateSpace out;
  out.a = MatrixXd::Zero(n1 + n2, n1 + n2);
  out.a.topLeftCorner(n1, n1) = lhs.a;
  out.a.bottomRightCorner(n2, n2) = rhs.a;
  out.b.resize(n1 + n2);
  out.b.head(n1) = lhs.b;
  out.b.tail(n2) = rhs.b;
  out.c.resize(n1 + n2);
  out.c.head(n1) = lhs.c;
  out.c.tail(n2) = rhs.c;
  out.d = lhs.d + rhs.d;
  return out;
}

StateSpace scaled(const StateSpace& sys, double k) {
  StateSpace out = sys;
  out.c *= k;
  out.d *= k;
  return out;
}

StateSpace inverse(const StateSpace& sys) {
  if (sys.d == 0.0) throw Error(ErrorCode::kNonInvertible, "non-invertible controller");
  StateSpace out;
  const double dinv = 1.0 / sys.d;
  out.a = sys.a - dinv * sys.b * sys.c;
  out.b = dinv * sys.b;
  out.c = -dinv * sys.c;
  out.d = dinv;
  return out;
}

StateSpace unity_feedback(const StateSpace& loop) {
  const double den = 1.0 + loop.d;
  if (std::abs(den) <= 1e-12) throw Error(ErrorCode::kAlgebraicLoop, "algebraic loop: 1 + L(inf) = 0");
  StateSpace out;
  out.a = loop.a - (loop.b * loop.c) / den;
  out.b = loop.b / den;
  out.c = loop.c / den;
  out.d = loop.d / den;
  return out;
}

std::vector<double> simulate(const StateSpace& sys, std::span<const double> u) {
  std::vector<double> y(u.size());
  const Index n = sys.order();
  if (n == 0) {
    for (std::size_t k = 0; k < u.size(); ++k) y[k] = sys.d * u[k];
    return y;
  }
  VectorXd x = VectorXd::Zero(n);
  VectorXd next(n);
  for (std::size_t k = 0; k < u.size(); ++k) {
    y[k] = sys.c.dot(x) + sys.d * u[k];
    next.noalias() = sys.a * x;
    next += sys.b * u[k];
    x.swap(next);
  }
  return y;
}

std::vector<std::complex<double>> eigenvalues(const StateSpace& sys) {
  if (sys.order() == 0) return {};
  Eigen::EigenSolver<MatrixXd> solver(sys.a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kNumerical, "eigenvalue iteration did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::complex<double> transfer_at(const StateSpace& sys, std::complex<double> z) {
  if (sys.order() == 0) return sys.d;
  const Eigen::MatrixXcd shifted =
      z * Eigen::MatrixXcd::Identity(sys.order(), sys.order()) - sys.a.cast<std::complex<double>>();
  const Eigen::VectorXcd x = shifted.partialPivLu().solve(sys.b.cast<std::complex<double>>());
  return sys.d + (sys.c.cast<std::complex<double>>() * x)(0);
}

}  // namespace frit
