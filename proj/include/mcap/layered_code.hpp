#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mcap {

/// A layer that carries a finite slice of power at a single gain.
struct Impulse {
  double gain;
  double power;
};

using FamilyParams = std::vector<std::pair<std::string, double>>;

/// Continuous power density rho(h) >= 0 over a finite support [lo, hi].
///
/// Implementations are immutable. `mass_above(h)` is the power the piece puts
/// strictly above h, so it equals the total mass for h <= lo and 0 for h >= hi.
class DensityFamily {
 public:
  virtual ~DensityFamily() = default;

  /// Serialization tag, e.g. "rho0" or "grid".
  virtual std::string name() const = 0;
  virtual FamilyParams params() const = 0;
  virtual double lo() const = 0;
  virtual double hi() const = 0;
  virtual double density(double h) const = 0;
  virtual double mass_above(double h) const = 0;
  double mass() const { return mass_above(lo()); }
  /// Points where the density is not smooth; quadrature splits there.
  virtual std::vector<double> breakpoints() const { return {}; }
};

using DensityPtr = std::shared_ptr<const DensityFamily>;

/// Sampled density with piecewise-linear interpolation between samples.
class GridDensity final : public DensityFamily {
 public:
  struct Sample {
    double h;
    double rho;
  };

  /// Throws DomainError when fewer than two samples are given or the gains are
  /// not strictly increasing. Negative samples are accepted and surface in
  /// validate().
  explicit GridDensity(std::vector<Sample> samples);

  std::string name() const override { return "grid"; }
  FamilyParams params() const override { return {}; }
  double lo() const override { return samples_.front().h; }
  double hi() const override { return samples_.back().h; }
  double density(double h) const override;
  double mass_above(double h) const override;
  std::vector<double> breakpoints() const override;

  const std::vector<Sample>& samples() const { return samples_; }

 private:
  std::vector<Sample> samples_;
  std::vector<double> suffix_mass_;  // trapezoid mass above samples_[i].h
};

/// Superposition code: impulse layers plus continuous density pieces.
struct LayeredAllocation {
  double budget = 0.0;
  std::vector<Impulse> impulses;  // strictly increasing gains
  std::vector<DensityPtr> pieces;

  double total_power() const;
};

/// One point on a capacity-region boundary; rates in nats.
struct CapacityPoint {
  double coverage = 0.0;
  double average = 0.0;
  double parameter = 0.0;
};

/// I(h): power in layers strictly above h.
double interference_at(const LayeredAllocation& alloc, double h);

/// Total density rho(h) summed over pieces.
double density_at(const LayeredAllocation& alloc, double h);

/// Rate contributed by impulse k: log(1 + h_k P_k / (1 + h_k I(h_k))).
double impulse_rate(const LayeredAllocation& alloc, std::size_t k);

/// dR/dh of the continuous layers: h rho(h) / (1 + h I(h)).
double density_rate_density(const LayeredAllocation& alloc, double h);

/// R(h): rate decodable at gain h. Impulses at gains <= h count as decodable.
double rate_at(const LayeredAllocation& alloc, double h);

using WeightFunction = std::function<double(double)>;

/// int w(h) dR_h. Extra breakpoints mark discontinuities of w.
double expected_weighted_rate(const LayeredAllocation& alloc, const WeightFunction& w,
                              std::span<const double> breakpoints = {});

/// R_eps = R(h_eps).
double outage_rate(const LayeredAllocation& alloc, double h_eps);

struct Violation {
  enum class Kind { Budget, Negative, Ordering, Support };
  Kind kind;
  double magnitude;
  std::string message;
};

struct AllocationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the budget identity (1e-8 relative), nonnegativity, impulse ordering
/// and piece supports.
AllocationReport validate(const LayeredAllocation& alloc);

/// Replaces every analytic piece by a GridDensity with `points` log-spaced
/// samples. Samples are rescaled so each grid carries the exact analytic mass.
LayeredAllocation discretize(const LayeredAllocation& alloc, int points = 2048);

/// Allocation with all power in one layer at `gain`.
LayeredAllocation single_layer(double budget, double gain);

/// R(h) tabulated for repeated evaluation.
///
/// Cumulative rates are stored at nodes covering every density support; values
/// between nodes use a 5-point Gauss-Legendre rule on the partial cell.
/// Immutable after construction and safe to share across threads.
class RateProfile {
 public:
  explicit RateProfile(LayeredAllocation alloc, int nodes_per_piece = 512);

  double operator()(double h) const;
  const LayeredAllocation& allocation() const { return alloc_; }
  /// R(infinity).
  double total_rate() const { return total_; }

 private:
  LayeredAllocation alloc_;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;  // density rate on [0, nodes_[j]]
  std::vector<double> impulse_gains_;
  std::vector<double> impulse_cumulative_;  // rate of impulses [0, k]
  double total_ = 0.0;
};

}  // namespace mcap
