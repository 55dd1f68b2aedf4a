#include "mcap/numerics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mcap/errors.hpp"

namespace mcap {

void Tolerance::check() const {
  if (!(rel > 0.0) || !(abs > 0.0) || max_iter < 1) {
    throw DomainError("tolerance requires rel > 0, abs > 0, max_iter >= 1");
  }
}

namespace {

double e1_series(double x) {
  // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
  double sum = 0.0;
  double term = 1.0;  // (-x)^k / k!
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double contrib = term / k;
    sum += contrib;
    if (std::fabs(contrib) < 1e-17 * std::fabs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

double e1_continued_fraction(double x) {
  // Modified Lentz evaluation of e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))).
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) return h * std::exp(-x);
  }
  throw ConvergenceError("E1 continued fraction did not converge");
}

}  // namespace

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_e1 requires x > 0");
  if (std::isinf(x)) return 0.0;
  return x < 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double regularized_upper_gamma_int(int m, double x) {
  if (m < 1) throw DomainError("incomplete gamma requires integer shape m >= 1");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma requires x >= 0");
  if (x == 0.0) return 1.0;
  const double log_x = std::log(x);
  double log_term = -x;
  double sum = std::exp(log_term);
  for (int k = 1; k < m; ++k) {
    log_term += log_x - std::log(static_cast<double>(k));
    sum += std::exp(log_term);
  }
  return std::min(sum, 1.0);
}

double upper_incomplete_gamma_int(int m, double x) {
  const double reg = regularized_upper_gamma_int(m, x);
  return std::tgamma(static_cast<double>(m)) * reg;
}

namespace {

struct SimpsonSegment {
  double a, b, fa, fm, fb, whole;
  int depth;
};

double finite_eval(const ScalarFunction& f, double x, double inward) {
  double v = f(x);
  if (std::isfinite(v)) return v;
  // Integrable endpoint singularity: sample just inside.
  for (double step = 1e-12; step < 1e-3; step *= 1e3) {
    v = f(x + step * inward);
    if (std::isfinite(v)) return v;
  }
  throw DomainError("integrand is not finite near x = " + std::to_string(x));
}

}  // namespace

double integrate_adaptive(const ScalarFunction& f, double a, double b,
                          const Tolerance& tol) {
  tol.check();
  if (!(a <= b)) throw DomainError("integrate_adaptive requires a <= b");
  if (a == b) return 0.0;

  const double width = b - a;
  const double fa = finite_eval(f, a, width);
  const double fb = finite_eval(f, b, -width);
  const double m = 0.5 * (a + b);
  const double fm = f(m);

  // Coarse magnitude from a 16-panel composite Simpson sweep.
  double coarse = 0.0;
  {
    constexpr int panels = 16;
    const double h = width / panels;
    double prev = fa;
    for (int i = 0; i < panels; ++i) {
      const double x0 = a + i * h;
      const double next = (i + 1 == panels) ? fb : f(x0 + h);
      coarse += h / 6.0 * (prev + 4.0 * f(x0 + 0.5 * h) + next);
      prev = next;
    }
  }
  const double eps = std::max(tol.abs, tol.rel * std::fabs(coarse));

  constexpr int max_depth = 60;
  std::vector<SimpsonSegment> stack;
  stack.push_back({a, b, fa, fm, fb, width / 6.0 * (fa + 4.0 * fm + fb), 0});

  // Neumaier-compensated accumulation.
  double sum = 0.0;
  double comp = 0.0;
  auto accumulate = [&](double v) {
    const double t = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  };

  int subdivisions = 0;
  while (!stack.empty()) {
    const SimpsonSegment s = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (s.a + s.b);
    const double lm = 0.5 * (s.a + mid);
    const double rm = 0.5 * (mid + s.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = s.b - s.a;
    const double left = h / 12.0 * (s.fa + 4.0 * flm + s.fm);
    const double right = h / 12.0 * (s.fm + 4.0 * frm + s.fb);
    const double err = left + right - s.whole;
    const double local_eps = eps * h / width;
    const bool too_narrow = !(lm > s.a && rm < s.b);
    if (std::fabs(err) <= 15.0 * local_eps || s.depth >= max_depth || too_narrow) {
      if (!std::isfinite(left + right)) {
        throw ConvergenceError("integrate_adaptive produced a non-finite value");
      }
      accumulate(left + right + err / 15.0);
      continue;
    }
    if (++subdivisions > tol.max_iter) {
      throw ConvergenceError("integrate_adaptive exceeded " +
                             std::to_string(tol.max_iter) + " subdivisions");
    }
    stack.push_back({mid, s.b, s.fm, frm, s.fb, right, s.depth + 1});
    stack.push_back({s.a, mid, s.fa, flm, s.fm, left, s.depth + 1});
  }
  return sum + comp;
}

double find_root_bracketed(const ScalarFunction& f, double lo, double hi,
                           const Tolerance& tol) {
  tol.check();
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (std::isnan(fa) || std::isnan(fb)) throw DomainError("root bracket evaluates to NaN");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw BracketError("no sign change on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * DBL_EPSILON * std::fabs(b) +
                        0.5 * (tol.rel * std::fabs(b) + DBL_MIN);
    const double xm = 0.5 * (c - b);
    if (std::fabs(fb) <= tol.abs || std::fabs(xm) <= tol1) return b;

    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      // Inverse quadratic interpolation, or secant when only two points differ.
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
      const double min2 = std::fabs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b);
    if (std::isnan(fb)) throw DomainError("root function evaluated to NaN");
  }
  throw ConvergenceError("find_root_bracketed exceeded its iteration budget");
}

ScalarMaximum maximize_scalar(const ScalarFunction& f, double lo, double hi,
                              const Tolerance& tol, int grid) {
  tol.check();
  if (!(lo <= hi)) throw DomainError("maximize_scalar requires lo <= hi");
  ScalarMaximum best{lo, f(lo)};
  if (lo == hi) return best;
  auto consider = [&](double x, double v) {
    if (v > best.value) best = {x, v};
  };

  grid = std::max(grid, 3);
  const double step = (hi - lo) / (grid - 1);
  int best_index = 0;
  for (int i = 1; i < grid; ++i) {
    const double x = (i + 1 == grid) ? hi : lo + i * step;
    const double v = f(x);
    if (v > best.value) {
      best = {x, v};
      best_index = i;
    }
  }

  double a = best_index == 0 ? lo : lo + (best_index - 1) * step;
  double b = best_index + 1 >= grid ? hi : lo + (best_index + 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  consider(x1, f1);
  consider(x2, f2);
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if (b - a <= tol.rel * std::fabs(0.5 * (a + b)) + tol.abs) break;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
      consider(x2, f2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
      consider(x1, f1);
    }
  }
  return best;
}

}  // namespace mcap
