#include "mcap/soft_coverage.hpp"

#include <cmath>

#include "mcap/errors.hpp"
#include "mcap/hard_coverage.hpp"
#include "mcap/numerics.hpp"

namespace mcap {

namespace {

// Numerator and denominator of i_gamma_sc after dividing both by e^-h.
struct SoftParts {
  double num, den, dnum, dden;
};

SoftParts soft_parts(double h, double gamma, int n) {
  const double nn = n;
  const double t = gamma * std::exp(-(nn - 1.0) * h);
  SoftParts s;
  s.num = (1.0 - h) + t * (1.0 - nn * h);
  s.den = h * h * (1.0 + nn * t);
  s.dnum = -1.0 - (nn - 1.0) * t * (1.0 - nn * h) - nn * t;
  s.dden = 2.0 * h * (1.0 + nn * t) - h * h * nn * (nn - 1.0) * t;
  return s;
}

void check_soft_args(double h, double gamma, int n) {
  if (!(h > 0.0)) throw DomainError("soft-coverage profile requires h > 0");
  if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
  if (n < 1) throw DomainError("users must be >= 1");
}

}  // namespace

double i_gamma_sc(double h, double gamma, int n) {
  check_soft_args(h, gamma, n);
  const SoftParts s = soft_parts(h, gamma, n);
  return s.num / s.den;
}

double rho_gamma_sc(double h, double gamma, int n) {
  check_soft_args(h, gamma, n);
  const SoftParts s = soft_parts(h, gamma, n);
  return -(s.dnum * s.den - s.num * s.dden) / (s.den * s.den);
}

SoftDensity::SoftDensity(double gamma, int n, double lo, double hi)
    : gamma_(gamma), n_(n), lo_(lo), hi_(hi) {
  if (!(gamma >= 0.0) || n < 1) throw DomainError("soft density needs gamma >= 0, n >= 1");
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("soft density needs 0 < lo < hi");
}

double SoftDensity::density(double h) const {
  return (h < lo_ || h > hi_) ? 0.0 : rho_gamma_sc(h, gamma_, n_);
}

double SoftDensity::mass_above(double h) const {
  if (h >= hi_) return 0.0;
  return i_gamma_sc(std::max(h, lo_), gamma_, n_) - i_gamma_sc(hi_, gamma_, n_);
}

GainThresholds solve_thresholds_sc(double gamma, int n, double p) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
  if (n < 1) throw DomainError("users must be >= 1");
  if (!(p > 0.0)) throw DomainError("power must be > 0");

  // Below min(1, 1/N) both numerator terms are positive, so the first zero of
  // the numerator lies in [1/N, 1]; it is 1 exactly when gamma = 0 or N = 1.
  auto numerator = [&](double h) { return soft_parts(h, gamma, n).num; };
  double h1 = 1.0;
  if (gamma > 0.0 && n > 1) {
    constexpr int scan = 512;
    const double a = 1.0 / n;
    double prev = a;
    for (int i = 1; i <= scan; ++i) {
      const double x = a + (1.0 - a) * i / scan;
      if (numerator(x) <= 0.0) {
        h1 = find_root_bracketed(numerator, prev, x);
        break;
      }
      prev = x;
    }
  }

  auto excess = [&](double h) { return i_gamma_sc(h, gamma, n) - p; };
  double lo = std::min(0.5 * h1, i0_inv(p));
  while (excess(lo) <= 0.0) {
    lo *= 0.5;
    if (lo < 1e-300) throw BracketError("could not bracket h0");
  }
  const double h0 = find_root_bracketed(excess, lo, h1);
  return {h0, h1};
}

SoftSolution region_point_soft(double gamma, const NetworkConfig& cfg) {
  if (cfg.users < 1 || !(cfg.power > 0.0)) throw DomainError("invalid network config");
  const GainThresholds th = solve_thresholds_sc(gamma, cfg.users, cfg.power);
  SoftSolution sol;
  sol.gamma = gamma;
  sol.h0 = th.h0;
  sol.h1 = th.h1;
  sol.allocation.budget = cfg.power;
  sol.allocation.pieces.push_back(
      std::make_shared<const SoftDensity>(gamma, cfg.users, th.h0, th.h1));
  const double n = cfg.users;
  sol.point.average =
      expected_weighted_rate(sol.allocation, [](double u) { return std::exp(-u); });
  sol.point.coverage =
      expected_weighted_rate(sol.allocation, [n](double u) { return std::exp(-n * u); });
  sol.point.parameter = gamma;
  return sol;
}

LayeredAllocation unconstrained_allocation(double p) {
  if (!(p > 0.0)) throw DomainError("power must be > 0");
  LayeredAllocation alloc;
  alloc.budget = p;
  alloc.pieces.push_back(std::make_shared<const Rho0Density>(i0_inv(p)));
  return alloc;
}

SoftSolution solve_gamma_for_rmul(double target_rmul, const NetworkConfig& cfg) {
  SoftSolution low = region_point_soft(0.0, cfg);
  const double lo = low.point.coverage;
  const double tol = 1e-10;
  if (std::fabs(target_rmul - lo) <= tol) return low;
  const double hi = region_point_soft(kGammaCeiling, cfg).point.coverage;
  if (target_rmul < lo || target_rmul > hi) {
    throw OutOfRangeError("target R_mul outside the achievable interval", lo, hi);
  }
  // Search over t = log(1 + gamma) so the bracket spans many decades evenly.
  auto excess = [&](double t) {
    return region_point_soft(std::expm1(t), cfg).point.coverage - target_rmul;
  };
  const double t = find_root_bracketed(excess, 0.0, std::log1p(kGammaCeiling),
                                       Tolerance{1e-13, tol, 400});
  return region_point_soft(std::expm1(t), cfg);
}

std::vector<double> default_gamma_grid(int count, double gamma_min, double gamma_max) {
  if (count < 1) throw DomainError("gamma grid needs at least one point");
  if (!(gamma_min > 0.0) || !(gamma_max >= gamma_min)) {
    throw DomainError("gamma grid needs 0 < gamma_min <= gamma_max");
  }
  std::vector<double> grid{0.0};
  const int logs = count - 1;
  for (int i = 0; i < logs; ++i) {
    const double t = logs == 1 ? 0.0 : static_cast<double>(i) / (logs - 1);
    grid.push_back(gamma_min * std::pow(gamma_max / gamma_min, t));
  }
  return grid;
}

std::vector<SoftSolution> sweep_soft(std::span<const double> gammas,
                                     const NetworkConfig& cfg) {
  std::vector<SoftSolution> out;
  out.reserve(gammas.size());
  for (double g : gammas) out.push_back(region_point_soft(g, cfg));
  return out;
}

}  // namespace mcap
