#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcap/fading.hpp"
#include "mcap/layered_code.hpp"

namespace mcap {

struct SimConfig {
  NetworkConfig cfg;
  LayeredAllocation allocation;
  std::int64_t blocks = 1;
  std::uint64_t seed = 0;
  /// Rate whose multicast shortfall counts as an outage, if requested.
  std::optional<double> outage_rate;
  /// Worker threads; 0 reads MCAP_THREADS, then falls back to hardware concurrency.
  int threads = 0;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  ///< sample std / sqrt(blocks); infinite below two blocks
};

struct EmpiricalStats {
  Estimate r_ave;  ///< rate of user 0 in each block
  Estimate r_mul;  ///< rate of the worst user in each block
  std::optional<Estimate> outage_prob;
  std::int64_t blocks = 0;
};

/// Draws `blocks` independent blocks of N gains and averages the decodable
/// rates. Bit-identical for a given config regardless of the worker count.
/// Throws DomainError when the allocation fails validate().
EmpiricalStats simulate(const SimConfig& sim);

/// Worker count from MCAP_THREADS (0 or unset means hardware concurrency).
int default_thread_count();

struct AnalyticTargets {
  std::optional<double> r_ave;
  std::optional<double> r_mul;
  std::optional<double> outage_prob;
};

/// R_ave and R_mul of an allocation under the config's fading law.
AnalyticTargets analytic_targets(const LayeredAllocation& alloc, const NetworkConfig& cfg);

struct ZScore {
  std::string name;
  double empirical = 0.0;
  double analytic = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  bool flagged = false;  ///< |z| > threshold
};

struct ComparisonReport {
  std::vector<ZScore> entries;
  bool any_flagged() const;
};

ComparisonReport compare_analytic(const EmpiricalStats& stats, const AnalyticTargets& analytic,
                                  double threshold = 3.0);

}  // namespace mcap
