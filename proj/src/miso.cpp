#include "mcap/miso.hpp"

#include <cmath>

#include "mcap/errors.hpp"
#include "mcap/numerics.hpp"

namespace mcap {

namespace {

void check_miso_args(double gamma, int m, int n) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
  if (m < 1) throw DomainError("antennas must be >= 1");
  if (n < 1) throw DomainError("users must be >= 1");
}

// Pieces shared by mu and its derivative at gain h:
//   G   survival of the typical gain
//   pdf its density
//   A   1 + gamma N G^{N-1}              (so -w' = pdf A)
//   B   d(pdf A)/dh / pdf
struct MisoParts {
  double w, pdf, a, b;
};

MisoParts miso_parts(double h, double gamma, int m, int n) {
  const ChannelDistribution dist = ChannelDistribution::for_antennas(m);
  const double g = survival_typical(dist, h);
  const double pdf = pdf_typical(dist, h);
  const double nn = n;
  const double g_nm1 = n > 1 ? std::pow(g, nn - 1.0) : 1.0;
  MisoParts s;
  s.w = g + gamma * g * g_nm1;
  s.pdf = pdf;
  s.a = 1.0 + gamma * nn * g_nm1;
  const double g_nm2 = n > 2 ? std::pow(g, nn - 2.0) : 1.0;
  const double dlogpdf = (m - 1.0) / h - m;
  s.b = dlogpdf * s.a - (n > 1 ? gamma * nn * (nn - 1.0) * g_nm2 * pdf : 0.0);
  return s;
}

}  // namespace

double w_fun(double x, double gamma, int m, int n) {
  check_miso_args(gamma, m, n);
  if (!(x >= 0.0)) throw DomainError("w_fun requires x >= 0");
  const double g = survival_typical(ChannelDistribution::for_antennas(m), x);
  return g + gamma * std::pow(g, n);
}

double w_prime(double x, double gamma, int m, int n) {
  check_miso_args(gamma, m, n);
  if (!(x > 0.0)) throw DomainError("w_prime requires x > 0");
  const ChannelDistribution dist = ChannelDistribution::for_antennas(m);
  const double g = survival_typical(dist, x);
  return -pdf_typical(dist, x) * (1.0 + gamma * n * std::pow(g, n - 1));
}

double mu_interference(double h, double gamma, int m, int n) {
  check_miso_args(gamma, m, n);
  if (!(h > 0.0)) throw DomainError("mu_interference requires h > 0");
  const MisoParts s = miso_parts(h, gamma, m, n);
  return s.w / (h * h * s.pdf * s.a) - 1.0 / h;
}

double rho_miso(double h, double gamma, int m, int n) {
  check_miso_args(gamma, m, n);
  if (!(h > 0.0)) throw DomainError("rho_miso requires h > 0");
  // With v = -w' = pdf A: mu' = -w (2v + h v') / (h^3 v^2).
  const MisoParts s = miso_parts(h, gamma, m, n);
  return s.w * (2.0 * s.a + h * s.b) / (h * h * h * s.pdf * s.a * s.a);
}

MisoDensity::MisoDensity(double gamma, int m, int n, double lo, double hi)
    : gamma_(gamma), m_(m), n_(n), lo_(lo), hi_(hi) {
  check_miso_args(gamma, m, n);
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("miso density needs 0 < lo < hi");
}

double MisoDensity::density(double h) const {
  return (h < lo_ || h > hi_) ? 0.0 : rho_miso(h, gamma_, m_, n_);
}

double MisoDensity::mass_above(double h) const {
  if (h >= hi_) return 0.0;
  return mu_interference(std::max(h, lo_), gamma_, m_, n_) -
         mu_interference(hi_, gamma_, m_, n_);
}

GainThresholds solve_thresholds_miso(double gamma, int m, int n, double p) {
  check_miso_args(gamma, m, n);
  if (!(p > 0.0)) throw DomainError("power must be > 0");

  // mu has the sign of w - h pdf A, which is positive near 0.
  auto numerator = [&](double h) {
    const MisoParts s = miso_parts(h, gamma, m, n);
    return s.w - h * s.pdf * s.a;
  };
  constexpr int scan = 2000;
  const double a = 1e-4;
  const double b = 20.0;
  double prev = a;
  double h1 = -1.0;
  for (int i = 1; i <= scan; ++i) {
    const double x = a * std::pow(b / a, static_cast<double>(i) / scan);
    if (numerator(x) <= 0.0) {
      h1 = find_root_bracketed(numerator, prev, x);
      break;
    }
    prev = x;
  }
  if (h1 < 0.0) throw BracketError("mu has no zero below h = 20");

  auto excess = [&](double h) { return mu_interference(h, gamma, m, n) - p; };
  double lo = 0.5 * h1;
  while (excess(lo) <= 0.0) {
    lo *= 0.5;
    if (lo < 1e-300) throw BracketError("could not bracket h0");
  }
  return {find_root_bracketed(excess, lo, h1), h1};
}

MisoSolution region_point_miso(double gamma, const NetworkConfig& cfg) {
  if (cfg.users < 1 || !(cfg.power > 0.0) || cfg.antennas < 1) {
    throw DomainError("invalid network config");
  }
  const GainThresholds th = solve_thresholds_miso(gamma, cfg.antennas, cfg.users, cfg.power);
  MisoSolution sol;
  sol.gamma = gamma;
  sol.antennas = cfg.antennas;
  sol.h0 = th.h0;
  sol.h1 = th.h1;
  sol.allocation.budget = cfg.power;
  sol.allocation.pieces.push_back(
      std::make_shared<const MisoDensity>(gamma, cfg.antennas, cfg.users, th.h0, th.h1));
  const ChannelDistribution dist = cfg.distribution();
  const int n = cfg.users;
  sol.point.average = expected_weighted_rate(
      sol.allocation, [&](double u) { return survival_typical(dist, u); });
  sol.point.coverage = expected_weighted_rate(
      sol.allocation, [&](double u) { return survival_multicast(dist, n, u); });
  sol.point.parameter = gamma;
  return sol;
}

std::vector<MisoSolution> sweep_miso(std::span<const double> gammas,
                                     const NetworkConfig& cfg) {
  std::vector<MisoSolution> out;
  out.reserve(gammas.size());
  for (double g : gammas) out.push_back(region_point_miso(g, cfg));
  return out;
}

namespace {

double sigma_prime_of(double p, double sigma) {
  if (!(p > 0.0)) throw DomainError("power must be > 0");
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  const double sp = (1.0 + p) * sigma / p;
  if (!(sp < 1.0)) throw DomainError("sigma' = (1 + P) sigma / P must be < 1");
  return sp;
}

}  // namespace

AntennaBound required_antennas(int n, double p, double sigma, double slack) {
  if (n < 1) throw DomainError("users must be >= 1");
  if (!(slack > 0.0)) throw DomainError("slack must be > 0");
  const double sp = sigma_prime_of(p, sigma);
  const double m = std::ceil((2.0 * std::log(static_cast<double>(n)) + slack) / (sp * sp));
  return {sigma, sp, std::max(1, static_cast<int>(m)), slack};
}

SingleLayerScheme single_layer_scheme(double p, double sigma) {
  const double sp = sigma_prime_of(p, sigma);
  return {std::log1p(p * (1.0 - sp)), 1.0 - sp};
}

double predicted_rmul_single_layer(int n, int m, double p, double sigma) {
  if (n < 1 || m < 1) throw DomainError("users and antennas must be >= 1");
  const SingleLayerScheme s = single_layer_scheme(p, sigma);
  const double sp = 1.0 - s.threshold;
  return std::pow(1.0 - q_function(std::sqrt(static_cast<double>(m)) * sp), n) * s.rate;
}

double exact_rmul_single_layer(int n, int m, double p, double sigma) {
  if (n < 1 || m < 1) throw DomainError("users and antennas must be >= 1");
  const SingleLayerScheme s = single_layer_scheme(p, sigma);
  return survival_multicast(ChannelDistribution::for_antennas(m), n, s.threshold) * s.rate;
}

double gaussian_multicast_cdf(int m, int n, double h) {
  if (n < 1 || m < 1) throw DomainError("users and antennas must be >= 1");
  return 1.0 - std::pow(q_function(std::sqrt(static_cast<double>(m)) * (h - 1.0)), n);
}

double ergodic_upper_bound(double p) {
  if (!(p >= 0.0)) throw DomainError("power must be >= 0");
  return std::log1p(p);
}

}  // namespace mcap
