#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mcap/fading.hpp"
#include "mcap/layered_code.hpp"

namespace mcap {

/// Optimal interference between the thresholds for the scalarized objective
/// R_ave + gamma R_mul on Rayleigh fading with N users.
double i_gamma_sc(double h, double gamma, int n);

/// -d/dh i_gamma_sc, analytic.
double rho_gamma_sc(double h, double gamma, int n);

/// rho_gamma_sc on [lo, hi]; mass_above is i_gamma_sc(h) - i_gamma_sc(hi).
class SoftDensity final : public DensityFamily {
 public:
  SoftDensity(double gamma, int n, double lo, double hi);
  std::string name() const override { return "soft"; }
  FamilyParams params() const override {
    return {{"gamma", gamma_}, {"users", static_cast<double>(n_)}, {"lo", lo_}, {"hi", hi_}};
  }
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  double density(double h) const override;
  double mass_above(double h) const override;

 private:
  double gamma_;
  int n_;
  double lo_, hi_;
};

struct GainThresholds {
  double h0;  ///< interference reaches the budget
  double h1;  ///< interference reaches zero
};

/// h0 solves i_gamma_sc = P and h1 is the first zero of i_gamma_sc.
GainThresholds solve_thresholds_sc(double gamma, int n, double p);

struct SoftSolution {
  double gamma = 0.0;
  double h0 = 0.0;
  double h1 = 0.0;
  LayeredAllocation allocation;
  CapacityPoint point;  ///< coverage = R_mul, average = R_ave
};

SoftSolution region_point_soft(double gamma, const NetworkConfig& cfg);

/// rho0 on [i0_inv(P), 1]: the R_ave-optimal code with no coverage demand.
LayeredAllocation unconstrained_allocation(double p);

/// Largest gamma used to estimate the supremum of R_mul.
inline constexpr double kGammaCeiling = 1e4;

/// Finds gamma with R_mul(gamma) = target. Throws OutOfRangeError carrying the
/// achievable interval [R_mul(0), R_mul(kGammaCeiling)].
SoftSolution solve_gamma_for_rmul(double target_rmul, const NetworkConfig& cfg);

/// {0} followed by `count - 1` log-spaced values in [gamma_min, gamma_max].
std::vector<double> default_gamma_grid(int count, double gamma_min = 1e-3,
                                       double gamma_max = 1e3);

std::vector<SoftSolution> sweep_soft(std::span<const double> gammas,
                                     const NetworkConfig& cfg);

}  // namespace mcap
