#include "mcap/fading.hpp"

#include <cmath>

#include "mcap/errors.hpp"
#include "mcap/numerics.hpp"

namespace mcap {

ChannelDistribution ChannelDistribution::normalized_chi_square(int m) {
  if (m < 1) throw DomainError("antenna count must be >= 1");
  return {Kind::NormalizedChiSquare, m};
}

ChannelDistribution ChannelDistribution::for_antennas(int m) {
  return m == 1 ? rayleigh() : normalized_chi_square(m);
}

void NetworkConfig::check() const {
  if (users < 1) throw DomainError("users must be >= 1");
  if (!(power > 0.0) || !std::isfinite(power)) throw DomainError("power must be > 0");
  if (antennas < 1) throw DomainError("antennas must be >= 1");
  if (!(eps >= 0.0) || !(eps < -std::expm1(-static_cast<double>(users)))) {
    throw DomainError("outage probability must satisfy 0 <= eps < 1 - exp(-users)");
  }
}

namespace {

void require_gain(double h) {
  if (!(h >= 0.0)) throw DomainError("channel gain must be >= 0");
}

}  // namespace

double survival_typical(const ChannelDistribution& dist, double h) {
  require_gain(h);
  if (dist.antennas == 1) return std::exp(-h);
  return regularized_upper_gamma_int(dist.antennas, dist.antennas * h);
}

double survival_multicast(const ChannelDistribution& dist, int n, double h) {
  if (n < 1) throw DomainError("user count must be >= 1");
  if (dist.antennas == 1) {
    require_gain(h);
    return std::exp(-static_cast<double>(n) * h);
  }
  return std::pow(survival_typical(dist, h), n);
}

double cdf_typical(const ChannelDistribution& dist, double h) {
  if (dist.antennas == 1) {
    require_gain(h);
    return -std::expm1(-h);
  }
  return 1.0 - survival_typical(dist, h);
}

double cdf_multicast(const ChannelDistribution& dist, int n, double h) {
  if (n < 1) throw DomainError("user count must be >= 1");
  if (dist.antennas == 1) {
    require_gain(h);
    return -std::expm1(-static_cast<double>(n) * h);
  }
  return 1.0 - survival_multicast(dist, n, h);
}

double pdf_typical(const ChannelDistribution& dist, double h) {
  require_gain(h);
  const int m = dist.antennas;
  if (m == 1) return std::exp(-h);
  if (h == 0.0) return 0.0;
  // M^M h^{M-1} e^{-Mh} / (M-1)!
  const double md = m;
  // tgamma leaves signgam alone, unlike lgamma, so this stays thread-safe.
  const double log_norm = m <= 170 ? std::log(std::tgamma(md)) : std::lgamma(md);
  return std::exp(md * std::log(md) + (md - 1.0) * std::log(h) - md * h - log_norm);
}

double outage_threshold(const NetworkConfig& cfg) {
  if (cfg.antennas != 1) {
    throw DomainError("outage threshold is defined for single-antenna (Rayleigh) networks");
  }
  cfg.check();
  return -std::log1p(-cfg.eps) / cfg.users;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t block, std::uint64_t user)
    : state_(mix(mix(mix(0x6d636170ULL, seed), block), user)) {}

RngStream::result_type RngStream::operator()() { return splitmix64(state_); }

double RngStream::uniform_open_closed() {
  return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

double sample_gain(const ChannelDistribution& dist, RngStream& rng) {
  const int m = dist.antennas;
  if (m == 1) return -std::log(rng.uniform_open_closed());
  // Sum of M exponentials as -log of a product of uniforms, flushed in chunks
  // so the product never underflows.
  double log_sum = 0.0;
  double product = 1.0;
  for (int i = 0; i < m; ++i) {
    product *= rng.uniform_open_closed();
    if (product < 1e-250) {
      log_sum += std::log(product);
      product = 1.0;
    }
  }
  log_sum += std::log(product);
  return -log_sum / m;
}

}  // namespace mcap
