#pragma once

#include <span>
#include <vector>

#include "mcap/fading.hpp"
#include "mcap/layered_code.hpp"

namespace mcap {

/// Interference profile of the unconstrained optimum on Rayleigh fading:
/// I0(h) = (1 - h) / h^2 for 0 < h <= 1.
double i0(double h);

/// Inverse of i0: 2 / (1 + sqrt(1 + 4p)). Also the lowest active gain s0 of
/// the unconstrained optimum with budget p.
double i0_inv(double p);

/// rho0(h) = -I0'(h) = 2/h^3 - 1/h^2.
double rho0(double h);

/// Interference profile tilted by the outage multiplier lambda:
/// (lambda e^h + 1 - h) / h^2. Strictly decreasing on (0, 2).
double i_lambda_hc(double h, double lambda);

/// -d/dh i_lambda_hc = (2 - h)(lambda e^h + 1) / h^3.
double rho_lambda_hc(double h, double lambda);

/// rho0 on [lo, 1].
class Rho0Density final : public DensityFamily {
 public:
  explicit Rho0Density(double lo);
  std::string name() const override { return "rho0"; }
  FamilyParams params() const override { return {{"lo", lo_}}; }
  double lo() const override { return lo_; }
  double hi() const override { return 1.0; }
  double density(double h) const override;
  double mass_above(double h) const override;

 private:
  double lo_;
};

/// rho_lambda_hc on [lo, hi] with hi < 2.
class TiltedHardDensity final : public DensityFamily {
 public:
  TiltedHardDensity(double lambda, double lo, double hi);
  std::string name() const override { return "hard_tilted"; }
  FamilyParams params() const override {
    return {{"lambda", lambda_}, {"lo", lo_}, {"hi", hi_}};
  }
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  double density(double h) const override;
  double mass_above(double h) const override;

 private:
  double lambda_, lo_, hi_;
};

/// Rayleigh network with an outage constraint.
struct HardCoverageProblem {
  NetworkConfig cfg;
  double h_eps = 0.0;  ///< outage gain threshold
  double c_eps = 0.0;  ///< single-layer outage capacity log(1 + h_eps P)

  /// Throws DomainError for MISO or out-of-range eps.
  static HardCoverageProblem make(const NetworkConfig& cfg);

  /// The closed form holds when h_eps <= i0_inv(P).
  bool closed_form_applies() const;
  /// Largest admissible multicast interference level for coverage zeta C_eps.
  double alpha_bound(double zeta) const;
  double beta_from_zeta(double zeta) const;
  double zeta_from_beta(double beta) const;
};

/// Optimal channel gain-interference function for a given alpha and lambda.
double s_alpha(double p, double alpha, double lambda, const HardCoverageProblem& prob);

/// Rates achieved by s_alpha, from h-domain integrals over its pieces.
struct HardRates {
  double coverage;  ///< int_alpha^P m(p, s_alpha(p)) dp = R_eps
  double average;   ///< int_0^P g(p, s_alpha(p)) dp = R_ave
};
HardRates hard_rates(double alpha, double lambda, const HardCoverageProblem& prob);

/// Multiplier enforcing R_eps >= zeta C_eps at the given alpha. Zero when the
/// constraint is slack. Throws InfeasibleError when alpha exceeds alpha_bound.
double solve_lambda(double alpha, double zeta, const HardCoverageProblem& prob);

/// Boundary point for beta in [0, 1] when closed_form_applies().
/// Throws PreconditionError otherwise.
CapacityPoint region_point_closed_form(double beta, const HardCoverageProblem& prob);

/// Single layer of power beta P at h_eps on top of rho0.
LayeredAllocation build_allocation_hard(double beta, const HardCoverageProblem& prob);

struct HardSolution {
  double zeta = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
  CapacityPoint point;
};

/// Outer maximization over alpha with lambda resolved per alpha.
HardSolution solve_hard_general(double zeta, const HardCoverageProblem& prob);
CapacityPoint region_point_general(double zeta, const HardCoverageProblem& prob);

/// Allocation realizing a general-path solution.
LayeredAllocation build_allocation_general(const HardSolution& sol,
                                           const HardCoverageProblem& prob);

/// One point per grid value, read as beta when the closed form applies and as
/// zeta otherwise. Sorted by coverage.
std::vector<CapacityPoint> sweep_hard(std::span<const double> grid,
                                      const HardCoverageProblem& prob);

}  // namespace mcap
