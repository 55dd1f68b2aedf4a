#pragma once

#include <span>
#include <vector>

#include "mcap/fading.hpp"
#include "mcap/layered_code.hpp"
#include "mcap/soft_coverage.hpp"

namespace mcap {

/// w(x) = G + gamma G^N with G = Gamma(M, Mx) / Gamma(M), the survival of the
/// normalized chi-square gain.
double w_fun(double x, double gamma, int m, int n);

/// dw/dx = -(M^M x^{M-1} e^{-Mx} / Gamma(M)) (1 + gamma N G^{N-1}).
double w_prime(double x, double gamma, int m, int n);

/// mu(h) = -w(h) / (h^2 w'(h)) - 1/h, the stationary interference profile.
double mu_interference(double h, double gamma, int m, int n);

/// -d/dh mu, analytic (uses w'' internally).
double rho_miso(double h, double gamma, int m, int n);

/// rho_miso on [lo, hi]; mass_above is mu(h) - mu(hi).
class MisoDensity final : public DensityFamily {
 public:
  MisoDensity(double gamma, int m, int n, double lo, double hi);
  std::string name() const override { return "miso"; }
  FamilyParams params() const override {
    return {{"gamma", gamma_},
            {"antennas", static_cast<double>(m_)},
            {"users", static_cast<double>(n_)},
            {"lo", lo_},
            {"hi", hi_}};
  }
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  double density(double h) const override;
  double mass_above(double h) const override;

 private:
  double gamma_;
  int m_, n_;
  double lo_, hi_;
};

GainThresholds solve_thresholds_miso(double gamma, int m, int n, double p);

struct MisoSolution {
  double gamma = 0.0;
  int antennas = 1;
  double h0 = 0.0;
  double h1 = 0.0;
  LayeredAllocation allocation;
  CapacityPoint point;  ///< coverage = R_mul, average = R_ave
};

MisoSolution region_point_miso(double gamma, const NetworkConfig& cfg);

std::vector<MisoSolution> sweep_miso(std::span<const double> gammas,
                                     const NetworkConfig& cfg);

/// Antenna count that makes a single-layer code nearly loss-free for the worst
/// user, with `slack` standing in for the unbounded o(log N) term.
struct AntennaBound {
  double sigma = 0.0;
  double sigma_prime = 0.0;  ///< (1 + P) sigma / P
  int required_m = 1;
  double slack = 0.0;
};

AntennaBound required_antennas(int n, double p, double sigma, double slack);

struct SingleLayerScheme {
  double rate;       ///< R_sigma = log(1 + P (1 - sigma'))
  double threshold;  ///< decoding gain 1 - sigma'
};

SingleLayerScheme single_layer_scheme(double p, double sigma);

/// [1 - Q(sqrt(M) sigma')]^N R_sigma under the Gaussian approximation.
double predicted_rmul_single_layer(int n, int m, double p, double sigma);

/// P(min gain >= 1 - sigma') R_sigma with the exact chi-square law.
double exact_rmul_single_layer(int n, int m, double p, double sigma);

/// Gaussian approximation 1 - Q(sqrt(M)(h - 1))^N of the worst-user CDF.
double gaussian_multicast_cdf(int m, int n, double h);

/// log(1 + P), an upper bound on the ergodic capacity.
double ergodic_upper_bound(double p);

}  // namespace mcap
