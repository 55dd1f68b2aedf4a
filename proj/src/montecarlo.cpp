#include "mcap/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "mcap/errors.hpp"

namespace mcap {

namespace {

struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Summation runs in block order so the result does not depend on how blocks
// were split across workers.
Estimate estimate(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  NeumaierSum s;
  for (double x : xs) s.add(x);
  const double mean = s.value() / n;
  if (xs.size() < 2) return {mean, std::numeric_limits<double>::infinity()};
  NeumaierSum sq;
  for (double x : xs) sq.add((x - mean) * (x - mean));
  const double var = sq.value() / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

int default_thread_count() {
  if (const char* env = std::getenv("MCAP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

EmpiricalStats simulate(const SimConfig& sim) {
  if (sim.blocks < 1) throw DomainError("simulation needs at least one block");
  if (sim.cfg.users < 1 || sim.cfg.antennas < 1) throw DomainError("invalid network config");
  const AllocationReport report = validate(sim.allocation);
  if (!report.ok()) {
    throw DomainError("allocation failed validation: " + report.violations.front().message);
  }

  const RateProfile profile(sim.allocation);
  const ChannelDistribution dist = sim.cfg.distribution();
  const int users = sim.cfg.users;
  const auto blocks = static_cast<std::size_t>(sim.blocks);

  std::vector<double> typical(blocks);
  std::vector<double> worst(blocks);
  std::vector<double> outage(sim.outage_rate ? blocks : 0);
  const double outage_cut =
      sim.outage_rate ? *sim.outage_rate * (1.0 - 1e-12) : 0.0;

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      double min_gain = std::numeric_limits<double>::infinity();
      double first_gain = 0.0;
      for (int u = 0; u < users; ++u) {
        RngStream rng(sim.seed, b, static_cast<std::uint64_t>(u));
        const double g = sample_gain(dist, rng);
        if (u == 0) first_gain = g;
        min_gain = std::min(min_gain, g);
      }
      typical[b] = profile(first_gain);
      // R is nondecreasing, so the worst user's rate is R(min gain).
      worst[b] = profile(min_gain);
      if (sim.outage_rate) outage[b] = worst[b] < outage_cut ? 1.0 : 0.0;
    }
  };

  int workers = sim.threads > 0 ? sim.threads : default_thread_count();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), blocks));
  if (workers <= 1) {
    run_range(0, blocks);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (blocks + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(blocks, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  EmpiricalStats stats;
  stats.blocks = sim.blocks;
  stats.r_ave = estimate(typical);
  stats.r_mul = estimate(worst);
  if (sim.outage_rate) stats.outage_prob = estimate(outage);
  return stats;
}

AnalyticTargets analytic_targets(const LayeredAllocation& alloc, const NetworkConfig& cfg) {
  const ChannelDistribution dist = cfg.distribution();
  const int n = cfg.users;
  AnalyticTargets t;
  t.r_ave = expected_weighted_rate(alloc, [&](double h) { return survival_typical(dist, h); });
  t.r_mul =
      expected_weighted_rate(alloc, [&](double h) { return survival_multicast(dist, n, h); });
  return t;
}

bool ComparisonReport::any_flagged() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const ZScore& z) { return z.flagged; });
}

ComparisonReport compare_analytic(const EmpiricalStats& stats, const AnalyticTargets& analytic,
                                  double threshold) {
  ComparisonReport report;
  auto add = [&](const char* name, const Estimate& e, std::optional<double> target) {
    if (!target) return;
    ZScore z;
    z.name = name;
    z.empirical = e.mean;
    z.analytic = *target;
    z.std_error = e.std_error;
    const double diff = e.mean - *target;
    if (e.std_error > 0.0) {
      z.z = diff / e.std_error;
    } else {
      z.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    z.flagged = std::fabs(z.z) > threshold;
    report.entries.push_back(z);
  };
  add("r_ave", stats.r_ave, analytic.r_ave);
  add("r_mul", stats.r_mul, analytic.r_mul);
  if (stats.outage_prob) add("outage_prob", *stats.outage_prob, analytic.outage_prob);
  return report;
}

}  // namespace mcap
