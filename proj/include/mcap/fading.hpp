#pragma once

#include <cstdint>

namespace mcap {

/// Law of one user's effective channel gain.
///
/// Rayleigh is the single-antenna case: the gain |s|^2 is Exp(1). With M
/// transmit antennas the normalized norm |h|^2 / M is Gamma(M, 1/M). Both have
/// unit mean, and Rayleigh is the M = 1 member of the chi-square family.
struct ChannelDistribution {
  enum class Kind { Rayleigh, NormalizedChiSquare };

  Kind kind = Kind::Rayleigh;
  int antennas = 1;

  static ChannelDistribution rayleigh() { return {Kind::Rayleigh, 1}; }
  /// Throws DomainError for m < 1.
  static ChannelDistribution normalized_chi_square(int m);
  /// Rayleigh for m == 1, normalized chi-square otherwise.
  static ChannelDistribution for_antennas(int m);
};

/// N users sharing a power budget (linear SNR) with outage target eps.
struct NetworkConfig {
  int users = 1;
  double power = 1.0;
  double eps = 0.0;
  int antennas = 1;

  /// Throws DomainError unless n >= 1, p > 0, 0 <= eps < 1 - e^-n, m >= 1.
  void check() const;
  ChannelDistribution distribution() const {
    return ChannelDistribution::for_antennas(antennas);
  }
};

double cdf_typical(const ChannelDistribution& dist, double h);
double cdf_multicast(const ChannelDistribution& dist, int n, double h);

/// 1 - cdf_typical, evaluated without cancellation.
double survival_typical(const ChannelDistribution& dist, double h);
/// (1 - cdf_typical)^n.
double survival_multicast(const ChannelDistribution& dist, int n, double h);

/// Density of the typical gain.
double pdf_typical(const ChannelDistribution& dist, double h);

/// Outage gain h_eps = F_mul^{-1}(eps) = -log(1 - eps) / N for Rayleigh.
///
/// Throws DomainError for MISO configurations and when eps >= 1 - e^-N, where
/// h_eps would reach 1.
double outage_threshold(const NetworkConfig& cfg);

/// Counter-based uniform bit generator.
///
/// A stream is fully determined by (seed, block, user); draws from different
/// streams never depend on the order in which streams are consumed.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t block, std::uint64_t user);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open_closed();

 private:
  std::uint64_t state_;
};

/// One gain draw: Exp(1) for Rayleigh, mean of M Exp(1) draws otherwise.
double sample_gain(const ChannelDistribution& dist, RngStream& rng);

}  // namespace mcap
