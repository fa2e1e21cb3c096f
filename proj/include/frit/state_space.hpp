#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace frit {

class Polynomial;

// Discrete SISO realization x[k+1] = A x[k] + B u[k], y[k] = C x[k] + D u[k].
//
// Transfer functions keep one of these next to their polynomial form. Long
// expanded polynomials with clustered roots near z = 1 (Oustaloup filters
// after Tustin) lose their roots to rounding, while a realization assembled
// from first-order sections keeps each pole where it was placed.
struct StateSpace {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::RowVectorXd c;
  double d = 0.0;

  Eigen::Index order() const { return a.rows(); }

  static StateSpace gain(double k);
  // Observer canonical form of num/den; requires deg(num) <= deg(den).
  static StateSpace from_polynomials(const Polynomial& num, const Polynomial& den);
  // Single-state section (b0 z + b1) / (a0 z + a1), a0 != 0.
  static StateSpace first_order(double b0, double b1, double a0, double a1);
  // Pure delay z^-n as a shift register.
  static StateSpace delay(int n);
};

// Output of `first` feeds `second`.
StateSpace series(const StateSpace& first, const StateSpace& second);
StateSpace parallel(const StateSpace& lhs, const StateSpace& rhs);
StateSpace scaled(const StateSpace& sys, double k);
// Requires d != 0.
StateSpace inverse(const StateSpace& sys);
// Closes y = L (r - y). Requires 1 + d != 0.
StateSpace unity_feedback(const StateSpace& loop);

// Zero initial state, output length equals input length.
std::vector<double> simulate(const StateSpace& sys, std::span<const double> u);

std::vector<std::complex<double>> eigenvalues(const StateSpace& sys);

// D + C (zI - A)^-1 B.
std::complex<double> transfer_at(const StateSpace& sys, std::complex<double> z);

}  // namespace frit
