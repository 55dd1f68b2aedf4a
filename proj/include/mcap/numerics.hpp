#pragma once

#include <functional>
#include <utility>

namespace mcap {

/// Convergence controls shared by the iterative routines below.
struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
  int max_iter = 200000;

  /// Adaptive Simpson defaults.
  static Tolerance quadrature() { return {1e-9, 1e-12, 200000}; }
  /// Root finding runs to machine precision unless |f| drops below abs first.
  static Tolerance root() { return {4e-16, 1e-12, 400}; }
  /// Golden-section refinement of a 1-D maximizer.
  static Tolerance maximize() { return {1e-10, 1e-12, 400}; }

  /// Throws DomainError unless rel > 0, abs > 0 and max_iter >= 1.
  void check() const;
};

using ScalarFunction = std::function<double(double)>;

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.
double exp_integral_e1(double x);

/// Gaussian tail probability Q(x) = P(Z > x).
double q_function(double x);

/// Upper incomplete gamma Gamma(m, x) for integer shape m >= 1 and x >= 0.
double upper_incomplete_gamma_int(int m, double x);

/// Regularized form Gamma(m, x) / Gamma(m) = e^-x sum_{k<m} x^k / k!.
///
/// Evaluated term by term in log space so it stays finite for shapes well past
/// where (m-1)! overflows.
double regularized_upper_gamma_int(int m, double x);

/// Adaptive Simpson quadrature of f over [a, b].
///
/// The acceptance threshold is max(tol.abs, tol.rel * |coarse estimate|),
/// shared among subintervals in proportion to their width. Throws
/// ConvergenceError when more than tol.max_iter subdivisions are needed.
/// Non-finite endpoint values are re-sampled a hair inside the interval so
/// integrable endpoint singularities are tolerated.
double integrate_adaptive(const ScalarFunction& f, double a, double b,
                          const Tolerance& tol = Tolerance::quadrature());

/// Brent's method on a sign-changing bracket.
///
/// Returns x with |f(x)| <= tol.abs or a bracket no wider than
/// tol.rel * |x| + (a few ulps). Throws BracketError when f(lo) and f(hi)
/// share a strict sign.
double find_root_bracketed(const ScalarFunction& f, double lo, double hi,
                           const Tolerance& tol = Tolerance::root());

struct ScalarMaximum {
  double argmax;
  double value;
};

/// Grid scan followed by golden-section refinement around the best node.
///
/// For unimodal f this is the global maximizer; otherwise it is the local
/// maximum nearest the best grid node.
ScalarMaximum maximize_scalar(const ScalarFunction& f, double lo, double hi,
                              const Tolerance& tol = Tolerance::maximize(),
                              int grid = 64);

/// Fixed 5-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss_legendre5(F&& f, double a, double b) {
  constexpr double kNodes[5] = {0.0, 0.5384693101056830910363144,
                                -0.5384693101056830910363144,
                                0.9061798459386639927976269,
                                -0.9061798459386639927976269};
  constexpr double kWeights[5] = {
      0.5688888888888888888888889, 0.4786286704993664680412915,
      0.4786286704993664680412915, 0.2369268850561890875142640,
      0.2369268850561890875142640};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) sum += kWeights[i] * f(mid + half * kNodes[i]);
  return half * sum;
}

}  // namespace mcap
