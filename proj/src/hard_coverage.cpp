#include "mcap/hard_coverage.hpp"

#include <algorithm>
#include <cmath>

#include "mcap/errors.hpp"
#include "mcap/numerics.hpp"

namespace mcap {

namespace {

constexpr Tolerance kSegmentQuadrature{1e-11, 1e-15, 400000};

}  // namespace

double i0(double h) {
  if (!(h > 0.0) || h > 1.0) throw DomainError("i0 requires 0 < h <= 1");
  return (1.0 - h) / (h * h);
}

double i0_inv(double p) {
  if (!(p >= 0.0)) throw DomainError("i0_inv requires p >= 0");
  return 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * p));
}

double rho0(double h) {
  if (!(h > 0.0)) throw DomainError("rho0 requires h > 0");
  return (2.0 - h) / (h * h * h);
}

double i_lambda_hc(double h, double lambda) {
  if (!(h > 0.0)) throw DomainError("i_lambda_hc requires h > 0");
  return (lambda * std::exp(h) + 1.0 - h) / (h * h);
}

double rho_lambda_hc(double h, double lambda) {
  if (!(h > 0.0)) throw DomainError("rho_lambda_hc requires h > 0");
  return (2.0 - h) * (lambda * std::exp(h) + 1.0) / (h * h * h);
}

Rho0Density::Rho0Density(double lo) : lo_(lo) {
  if (!(lo > 0.0) || !(lo < 1.0)) throw DomainError("rho0 support needs 0 < lo < 1");
}

double Rho0Density::density(double h) const {
  return (h < lo_ || h > 1.0) ? 0.0 : rho0(h);
}

double Rho0Density::mass_above(double h) const {
  if (h >= 1.0) return 0.0;
  return i0(std::max(h, lo_));
}

TiltedHardDensity::TiltedHardDensity(double lambda, double lo, double hi)
    : lambda_(lambda), lo_(lo), hi_(hi) {
  if (!(lambda >= 0.0)) throw DomainError("tilted density needs lambda >= 0");
  if (!(lo > 0.0) || !(hi > lo) || !(hi < 2.0)) {
    throw DomainError("tilted density needs 0 < lo < hi < 2");
  }
}

double TiltedHardDensity::density(double h) const {
  return (h < lo_ || h > hi_) ? 0.0 : rho_lambda_hc(h, lambda_);
}

double TiltedHardDensity::mass_above(double h) const {
  if (h >= hi_) return 0.0;
  return i_lambda_hc(std::max(h, lo_), lambda_) - i_lambda_hc(hi_, lambda_);
}

HardCoverageProblem HardCoverageProblem::make(const NetworkConfig& cfg) {
  HardCoverageProblem prob;
  prob.cfg = cfg;
  prob.h_eps = outage_threshold(cfg);
  prob.c_eps = std::log1p(prob.h_eps * cfg.power);
  return prob;
}

bool HardCoverageProblem::closed_form_applies() const {
  return h_eps <= i0_inv(cfg.power);
}

double HardCoverageProblem::alpha_bound(double zeta) const {
  return std::expm1((1.0 - zeta) * c_eps) / h_eps;
}

double HardCoverageProblem::beta_from_zeta(double zeta) const {
  return std::clamp(1.0 - alpha_bound(zeta) / cfg.power, 0.0, 1.0);
}

double HardCoverageProblem::zeta_from_beta(double beta) const {
  const double p = cfg.power;
  const double r = std::log1p(h_eps * beta * p / (1.0 + h_eps * (1.0 - beta) * p));
  return std::clamp(r / c_eps, 0.0, 1.0);
}

namespace {

void require_unit(double x, const char* what) {
  if (!(x >= 0.0) || !(x <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

void require_positive_threshold(const HardCoverageProblem& prob) {
  if (!(prob.h_eps > 0.0)) {
    throw DomainError("hard coverage needs eps > 0 (h_eps = 0 admits no coverage layer)");
  }
}

// Gain where the tilted profile reaches the full budget; lies below h_eps
// whenever i_lambda_hc(h_eps) < P.
double tilted_floor(double lambda, const HardCoverageProblem& prob) {
  const double p = prob.cfg.power;
  const double lo = 0.5 * i0_inv(p);  // i_lambda_hc >= i0 > p here
  return find_root_bracketed([&](double h) { return i_lambda_hc(h, lambda) - p; }, lo,
                             prob.h_eps);
}

}  // namespace

double s_alpha(double p, double alpha, double lambda, const HardCoverageProblem& prob) {
  if (!(p >= 0.0) || p > prob.cfg.power) throw DomainError("s_alpha requires 0 <= p <= P");
  if (!(alpha >= 0.0) || !(lambda >= 0.0)) {
    throw DomainError("s_alpha requires alpha >= 0 and lambda >= 0");
  }
  require_positive_threshold(prob);
  if (p < alpha) return i0_inv(p);
  const double top = i_lambda_hc(prob.h_eps, lambda);
  if (p <= top) return prob.h_eps;
  const double lo = 0.5 * i0_inv(p);
  return find_root_bracketed([&](double h) { return i_lambda_hc(h, lambda) - p; }, lo,
                             prob.h_eps);
}

HardRates hard_rates(double alpha, double lambda, const HardCoverageProblem& prob) {
  require_positive_threshold(prob);
  const double p = prob.cfg.power;
  const double he = prob.h_eps;
  HardRates rates{0.0, 0.0};

  // p in [0, alpha): s = i0_inv(p), i.e. h in [i0_inv(alpha), 1], dp = rho0 dh.
  if (alpha > 0.0) {
    const double lo = i0_inv(alpha);
    rates.average += integrate_adaptive(
        [](double h) { return std::exp(-h) * h * rho0(h) / (1.0 + h * i0(h)); }, lo, 1.0,
        kSegmentQuadrature);
  }

  // p in [alpha, min(I_lambda(h_eps), P)]: s = h_eps, integrated in closed form.
  const double top = i_lambda_hc(he, lambda);
  const double mid_hi = std::min(top, p);
  const double mid = std::log((1.0 + he * mid_hi) / (1.0 + he * alpha));
  rates.coverage += mid;
  rates.average += std::exp(-he) * mid;

  // p in (I_lambda(h_eps), P]: s = I_lambda^{-1}(p), h in [h_P, h_eps].
  if (top < p) {
    const double floor = tilted_floor(lambda, prob);
    rates.coverage += integrate_adaptive(
        [&](double h) {
          return h * rho_lambda_hc(h, lambda) / (1.0 + h * i_lambda_hc(h, lambda));
        },
        floor, he, kSegmentQuadrature);
    rates.average += integrate_adaptive(
        [&](double h) {
          return std::exp(-h) * h * rho_lambda_hc(h, lambda) /
                 (1.0 + h * i_lambda_hc(h, lambda));
        },
        floor, he, kSegmentQuadrature);
  }
  return rates;
}

double solve_lambda(double alpha, double zeta, const HardCoverageProblem& prob) {
  require_unit(zeta, "zeta");
  require_positive_threshold(prob);
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  const double target = zeta * prob.c_eps;
  const double best = prob.c_eps - std::log1p(prob.h_eps * alpha);
  const double slack = 1e-12 * std::max(1.0, prob.c_eps);
  if (best < target - slack) {
    throw InfeasibleError("alpha exceeds the coverage bound (e^{(1-zeta)C_eps} - 1)/h_eps");
  }
  if (zeta == 0.0) return 0.0;

  const double at_zero = hard_rates(alpha, 0.0, prob).coverage;
  if (at_zero >= target) return 0.0;

  // Beyond lambda_sat the tilted profile clears P at h_eps and coverage is
  // pinned at `best`, so [0, lambda_sat] brackets the root.
  const double he = prob.h_eps;
  const double lambda_sat =
      (prob.cfg.power * he * he - (1.0 - he)) * std::exp(-he);
  if (!(lambda_sat > 0.0)) return 0.0;
  auto excess = [&](double lambda) {
    if (lambda >= lambda_sat) return best - target;
    return hard_rates(alpha, lambda, prob).coverage - target;
  };
  if (excess(lambda_sat) <= 0.0) return lambda_sat;
  return find_root_bracketed(excess, 0.0, lambda_sat, Tolerance{4e-16, 1e-13, 400});
}

CapacityPoint region_point_closed_form(double beta, const HardCoverageProblem& prob) {
  require_unit(beta, "beta");
  if (!prob.closed_form_applies()) {
    throw PreconditionError("closed form needs h_eps <= i0_inv(P)");
  }
  const double p = prob.cfg.power;
  const double he = prob.h_eps;
  const double coverage = std::log1p(he * beta * p / (1.0 + he * (1.0 - beta) * p));
  const double theta = i0_inv((1.0 - beta) * p);
  double layered = 0.0;
  if (theta < 1.0) {
    layered = 2.0 * (exp_integral_e1(theta) - exp_integral_e1(1.0)) -
              (std::exp(-theta) - std::exp(-1.0));
  }
  return {coverage, layered + std::exp(-he) * coverage, beta};
}

LayeredAllocation build_allocation_hard(double beta, const HardCoverageProblem& prob) {
  require_unit(beta, "beta");
  if (!prob.closed_form_applies()) {
    throw PreconditionError("closed-form allocation needs h_eps <= i0_inv(P)");
  }
  const double p = prob.cfg.power;
  LayeredAllocation alloc;
  alloc.budget = p;
  if (beta > 0.0) alloc.impulses.push_back({prob.h_eps, beta * p});
  const double alpha = (1.0 - beta) * p;
  if (alpha > 0.0) alloc.pieces.push_back(std::make_shared<const Rho0Density>(i0_inv(alpha)));
  return alloc;
}

HardSolution solve_hard_general(double zeta, const HardCoverageProblem& prob) {
  require_unit(zeta, "zeta");
  require_positive_threshold(prob);
  const double alpha_max =
      std::max(0.0, std::min({prob.alpha_bound(zeta), i0(prob.h_eps), prob.cfg.power}));

  auto objective = [&](double alpha) {
    const double lambda = solve_lambda(alpha, zeta, prob);
    return hard_rates(alpha, lambda, prob).average;
  };
  const ScalarMaximum best = maximize_scalar(objective, 0.0, alpha_max);

  HardSolution sol;
  sol.zeta = zeta;
  sol.alpha = best.argmax;
  sol.lambda = solve_lambda(sol.alpha, zeta, prob);
  sol.point = {zeta * prob.c_eps, best.value, zeta};
  return sol;
}

CapacityPoint region_point_general(double zeta, const HardCoverageProblem& prob) {
  return solve_hard_general(zeta, prob).point;
}

LayeredAllocation build_allocation_general(const HardSolution& sol,
                                           const HardCoverageProblem& prob) {
  const double p = prob.cfg.power;
  const double he = prob.h_eps;
  LayeredAllocation alloc;
  alloc.budget = p;
  const double top = i_lambda_hc(he, sol.lambda);
  if (top < p) {
    const double floor = tilted_floor(sol.lambda, prob);
    if (floor < he) {
      alloc.pieces.push_back(std::make_shared<const TiltedHardDensity>(sol.lambda, floor, he));
    }
  }
  const double layer = std::min(top, p) - sol.alpha;
  if (layer > 0.0) alloc.impulses.push_back({he, layer});
  if (sol.alpha > 0.0) {
    alloc.pieces.push_back(std::make_shared<const Rho0Density>(i0_inv(sol.alpha)));
  }
  return alloc;
}

std::vector<CapacityPoint> sweep_hard(std::span<const double> grid,
                                      const HardCoverageProblem& prob) {
  std::vector<CapacityPoint> points;
  points.reserve(grid.size());
  const bool closed = prob.closed_form_applies();
  for (double v : grid) {
    points.push_back(closed ? region_point_closed_form(v, prob) : region_point_general(v, prob));
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const CapacityPoint& a, const CapacityPoint& b) {
                     return a.coverage < b.coverage;
                   });
  return points;
}

}  // namespace mcap
