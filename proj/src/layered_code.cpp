#include "mcap/layered_code.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcap/errors.hpp"
#include "mcap/numerics.hpp"

namespace mcap {

namespace {

constexpr Tolerance kRateQuadrature{1e-11, 1e-15, 400000};

}  // namespace

GridDensity::GridDensity(std::vector<Sample> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw DomainError("grid density needs at least two samples");
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].h > samples_[i - 1].h)) {
      throw DomainError("grid density gains must be strictly increasing");
    }
  }
  if (!(samples_.front().h >= 0.0)) throw DomainError("grid density gains must be >= 0");
  suffix_mass_.assign(samples_.size(), 0.0);
  for (std::size_t i = samples_.size() - 1; i-- > 0;) {
    const auto& a = samples_[i];
    const auto& b = samples_[i + 1];
    suffix_mass_[i] = suffix_mass_[i + 1] + 0.5 * (b.h - a.h) * (a.rho + b.rho);
  }
}

double GridDensity::density(double h) const {
  if (h < lo() || h > hi()) return 0.0;
  auto it = std::upper_bound(samples_.begin(), samples_.end(), h,
                             [](double x, const Sample& s) { return x < s.h; });
  if (it == samples_.end()) return samples_.back().rho;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (h - a.h) / (b.h - a.h);
  return a.rho + t * (b.rho - a.rho);
}

double GridDensity::mass_above(double h) const {
  if (h <= lo()) return suffix_mass_.front();
  if (h >= hi()) return 0.0;
  auto it = std::upper_bound(samples_.begin(), samples_.end(), h,
                             [](double x, const Sample& s) { return x < s.h; });
  const std::size_t i = static_cast<std::size_t>(it - samples_.begin());
  const auto& b = samples_[i];
  return suffix_mass_[i] + 0.5 * (b.h - h) * (density(h) + b.rho);
}

std::vector<double> GridDensity::breakpoints() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.h);
  return out;
}

double LayeredAllocation::total_power() const {
  double total = 0.0;
  for (const auto& imp : impulses) total += imp.power;
  for (const auto& piece : pieces) total += piece->mass();
  return total;
}

double interference_at(const LayeredAllocation& alloc, double h) {
  double total = 0.0;
  for (const auto& imp : alloc.impulses) {
    if (imp.gain > h) total += imp.power;
  }
  for (const auto& piece : alloc.pieces) total += piece->mass_above(h);
  return total;
}

double density_at(const LayeredAllocation& alloc, double h) {
  double total = 0.0;
  for (const auto& piece : alloc.pieces) {
    if (h >= piece->lo() && h <= piece->hi()) total += piece->density(h);
  }
  return total;
}

double impulse_rate(const LayeredAllocation& alloc, std::size_t k) {
  const Impulse& imp = alloc.impulses.at(k);
  const double interference = interference_at(alloc, imp.gain);
  return std::log1p(imp.gain * imp.power / (1.0 + imp.gain * interference));
}

double density_rate_density(const LayeredAllocation& alloc, double h) {
  const double rho = density_at(alloc, h);
  if (rho == 0.0) return 0.0;
  return h * rho / (1.0 + h * interference_at(alloc, h));
}

namespace {

// Sorted cut points for integrating the continuous layers over [0, upper]:
// piece supports merged into intervals, each split at breakpoints.
std::vector<std::pair<double, double>> integration_cells(
    const LayeredAllocation& alloc, double upper, std::span<const double> extra) {
  std::vector<std::pair<double, double>> supports;
  for (const auto& piece : alloc.pieces) {
    const double lo = piece->lo();
    const double hi = std::min(piece->hi(), upper);
    if (hi > lo) supports.emplace_back(lo, hi);
  }
  std::sort(supports.begin(), supports.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& s : supports) {
    if (!merged.empty() && s.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, s.second);
    } else {
      merged.push_back(s);
    }
  }

  std::vector<double> cuts;
  for (const auto& piece : alloc.pieces) {
    for (double b : piece->breakpoints()) cuts.push_back(b);
  }
  for (const auto& imp : alloc.impulses) cuts.push_back(imp.gain);
  cuts.insert(cuts.end(), extra.begin(), extra.end());
  std::sort(cuts.begin(), cuts.end());

  std::vector<std::pair<double, double>> cells;
  for (const auto& [lo, hi] : merged) {
    double start = lo;
    auto it = std::upper_bound(cuts.begin(), cuts.end(), lo);
    for (; it != cuts.end() && *it < hi; ++it) {
      if (*it > start) {
        cells.emplace_back(start, *it);
        start = *it;
      }
    }
    cells.emplace_back(start, hi);
  }
  return cells;
}

double integrate_cells(const std::vector<std::pair<double, double>>& cells,
                       const ScalarFunction& f) {
  double total = 0.0;
  for (const auto& [a, b] : cells) total += integrate_adaptive(f, a, b, kRateQuadrature);
  return total;
}

}  // namespace

double rate_at(const LayeredAllocation& alloc, double h) {
  if (!(h >= 0.0)) throw DomainError("rate_at requires h >= 0");
  double rate = 0.0;
  for (std::size_t k = 0; k < alloc.impulses.size(); ++k) {
    if (alloc.impulses[k].gain <= h) rate += impulse_rate(alloc, k);
  }
  const auto cells = integration_cells(alloc, h, {});
  rate += integrate_cells(cells, [&](double u) { return density_rate_density(alloc, u); });
  return rate;
}

double expected_weighted_rate(const LayeredAllocation& alloc, const WeightFunction& w,
                              std::span<const double> breakpoints) {
  double rate = 0.0;
  for (std::size_t k = 0; k < alloc.impulses.size(); ++k) {
    rate += w(alloc.impulses[k].gain) * impulse_rate(alloc, k);
  }
  const auto cells =
      integration_cells(alloc, std::numeric_limits<double>::infinity(), breakpoints);
  rate += integrate_cells(cells,
                          [&](double u) { return w(u) * density_rate_density(alloc, u); });
  return rate;
}

double outage_rate(const LayeredAllocation& alloc, double h_eps) {
  return rate_at(alloc, h_eps);
}

AllocationReport validate(const LayeredAllocation& alloc) {
  AllocationReport report;
  auto add = [&](Violation::Kind kind, double magnitude, const std::string& msg) {
    report.violations.push_back({kind, magnitude, msg});
  };

  if (!(alloc.budget > 0.0)) add(Violation::Kind::Budget, 1.0, "budget must be > 0");

  for (std::size_t k = 0; k < alloc.impulses.size(); ++k) {
    const Impulse& imp = alloc.impulses[k];
    if (!(imp.gain >= 0.0)) {
      add(Violation::Kind::Support, -imp.gain, "impulse gain is negative");
    }
    if (!(imp.power > 0.0)) {
      add(Violation::Kind::Negative, -imp.power, "impulse power must be > 0");
    }
    if (k > 0 && !(imp.gain > alloc.impulses[k - 1].gain)) {
      add(Violation::Kind::Ordering, alloc.impulses[k - 1].gain - imp.gain,
          "impulse gains must be strictly increasing");
    }
  }

  for (const auto& piece : alloc.pieces) {
    if (!(piece->hi() > piece->lo()) || !(piece->lo() >= 0.0)) {
      add(Violation::Kind::Support, piece->lo() - piece->hi(),
          "density '" + piece->name() + "' has an empty or negative support");
      continue;
    }
    double worst = 0.0;
    if (const auto* grid = dynamic_cast<const GridDensity*>(piece.get())) {
      for (const auto& s : grid->samples()) worst = std::min(worst, s.rho);
    } else {
      constexpr int probes = 257;
      for (int i = 0; i < probes; ++i) {
        const double h = piece->lo() + (piece->hi() - piece->lo()) * i / (probes - 1);
        worst = std::min(worst, piece->density(h));
      }
    }
    if (worst < 0.0) {
      add(Violation::Kind::Negative, -worst,
          "density '" + piece->name() + "' takes negative values");
    }
  }

  if (alloc.budget > 0.0) {
    const double rel = std::fabs(alloc.total_power() - alloc.budget) / alloc.budget;
    if (rel > 1e-8) {
      std::ostringstream msg;
      msg << "power sums to " << alloc.total_power() << " but budget is " << alloc.budget;
      add(Violation::Kind::Budget, rel, msg.str());
    }
  }
  return report;
}

LayeredAllocation discretize(const LayeredAllocation& alloc, int points) {
  if (points < 2) throw DomainError("discretize needs at least two points");
  LayeredAllocation out{alloc.budget, alloc.impulses, {}};
  for (const auto& piece : alloc.pieces) {
    if (dynamic_cast<const GridDensity*>(piece.get()) != nullptr) {
      out.pieces.push_back(piece);
      continue;
    }
    const double lo = piece->lo();
    const double hi = piece->hi();
    std::vector<GridDensity::Sample> samples(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
      const double t = static_cast<double>(i) / (points - 1);
      double h = lo > 0.0 ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
      if (i == 0) h = lo;
      if (i + 1 == points) h = hi;
      samples[static_cast<std::size_t>(i)] = {h, piece->density(h)};
    }
    double trapezoid = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
      trapezoid += 0.5 * (samples[i].h - samples[i - 1].h) *
                   (samples[i].rho + samples[i - 1].rho);
    }
    if (trapezoid > 0.0) {
      const double scale = piece->mass() / trapezoid;
      for (auto& s : samples) s.rho *= scale;
    }
    out.pieces.push_back(std::make_shared<const GridDensity>(std::move(samples)));
  }
  return out;
}

LayeredAllocation single_layer(double budget, double gain) {
  if (!(budget > 0.0)) throw DomainError("single layer needs a positive budget");
  if (!(gain >= 0.0)) throw DomainError("single layer needs a nonnegative gain");
  return LayeredAllocation{budget, {{gain, budget}}, {}};
}

RateProfile::RateProfile(LayeredAllocation alloc, int nodes_per_piece)
    : alloc_(std::move(alloc)) {
  for (const auto& piece : alloc_.pieces) {
    const double lo = piece->lo();
    const double hi = piece->hi();
    nodes_.push_back(lo);
    nodes_.push_back(hi);
    auto bps = piece->breakpoints();
    nodes_.insert(nodes_.end(), bps.begin(), bps.end());
    for (int i = 1; i + 1 < nodes_per_piece; ++i) {
      const double t = static_cast<double>(i) / (nodes_per_piece - 1);
      nodes_.push_back(lo > 0.0 ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
    }
  }
  for (const auto& imp : alloc_.impulses) {
    nodes_.push_back(imp.gain);
    impulse_gains_.push_back(imp.gain);
  }
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());

  auto integrand = [this](double u) { return density_rate_density(alloc_, u); };
  cumulative_.assign(nodes_.size(), 0.0);
  for (std::size_t j = 1; j < nodes_.size(); ++j) {
    cumulative_[j] = cumulative_[j - 1] +
                     integrate_adaptive(integrand, nodes_[j - 1], nodes_[j], kRateQuadrature);
  }

  double running = 0.0;
  for (std::size_t k = 0; k < alloc_.impulses.size(); ++k) {
    running += impulse_rate(alloc_, k);
    impulse_cumulative_.push_back(running);
  }
  total_ = (cumulative_.empty() ? 0.0 : cumulative_.back()) + running;
}

double RateProfile::operator()(double h) const {
  double rate = 0.0;
  if (!nodes_.empty()) {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), h);
    if (it == nodes_.end()) {
      rate = cumulative_.back();
    } else if (it != nodes_.begin()) {
      const std::size_t j = static_cast<std::size_t>(it - nodes_.begin()) - 1;
      rate = cumulative_[j];
      if (h > nodes_[j]) {
        rate += gauss_legendre5(
            [this](double u) { return density_rate_density(alloc_, u); }, nodes_[j], h);
      }
    }
  }
  auto ik = std::upper_bound(impulse_gains_.begin(), impulse_gains_.end(), h);
  if (ik != impulse_gains_.begin()) {
    rate += impulse_cumulative_[static_cast<std::size_t>(ik - impulse_gains_.begin()) - 1];
  }
  return rate;
}

}  // namespace mcap
