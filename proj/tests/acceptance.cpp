// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "mcap/allocation_io.hpp"
#include "mcap/fading.hpp"
#include "mcap/hard_coverage.hpp"
#include "mcap/layered_code.hpp"
#include "mcap/miso.hpp"
#include "mcap/montecarlo.hpp"
#include "mcap/soft_coverage.hpp"
#include "oracles.hpp"

using namespace mcap;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const NetworkConfig kNet{5, 100.0, 0.01, 1};

bool within_3se(const Estimate& e, double target) {
  return std::fabs(e.mean - target) <= 3.0 * e.std_error;
}

Outcome unconstrained_optimum() {
  const double s0 = 0.0951254;
  const double closed = 2.0 * (oracle::e1(s0) - oracle::e1(1.0)) - (std::exp(-s0) - std::exp(-1.0));
  const double quad = oracle::rho0_average(s0);
  const auto alloc = unconstrained_allocation(100.0);
  const double lib = *analytic_targets(alloc, kNet).r_ave;
  const auto stats = simulate({kNet, alloc, 100000, 2024});
  const bool ok = std::fabs(closed - 2.7563) <= 5e-4 && std::fabs(quad - closed) <= 1e-9 &&
                  std::fabs(lib - 2.7563) <= 5e-4 && within_3se(stats.r_ave, lib);
  return {ok, fmt("closed=%.7f", closed) + fmt(" quad=%.7f", quad) + fmt(" lib=%.7f", lib) +
                  fmt(" mc=%.5f", stats.r_ave.mean) + fmt(" se=%.5f", stats.r_ave.std_error)};
}

Outcome hard_endpoints() {
  const auto prob = HardCoverageProblem::make(kNet);
  const auto top = region_point_closed_form(1.0, prob);
  const auto bottom = region_point_closed_form(0.0, prob);
  std::vector<double> grid(50);
  for (int i = 0; i < 50; ++i) grid[i] = i / 49.0;
  const auto sweep = sweep_hard(grid, prob);
  bool monotone = true, nondominated = true;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    monotone &= sweep[i].average <= sweep[i - 1].average;
    nondominated &= sweep[i].coverage > sweep[i - 1].coverage;
  }
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    for (std::size_t j = 0; j < sweep.size(); ++j) {
      if (i == j) continue;
      const bool dominates = sweep[j].coverage >= sweep[i].coverage &&
                             sweep[j].average >= sweep[i].average &&
                             (sweep[j].coverage > sweep[i].coverage || sweep[j].average > sweep[i].average);
      nondominated &= !dominates;
    }
  }
  const bool ok = std::fabs(top.coverage - std::log(1.201007)) <= 1e-5 &&
                  std::fabs(top.coverage - 0.183158) <= 1e-5 &&
                  std::fabs(top.average - 0.182790) <= 1e-5 && bottom.coverage == 0.0 &&
                  std::fabs(bottom.average - 2.7563) <= 5e-4 && sweep.size() == 50 && monotone &&
                  nondominated;
  return {ok, fmt("R_eps=%.7f", top.coverage) + fmt(" R_ave(1)=%.7f", top.average) +
                  fmt(" R_ave(0)=%.7f", bottom.average) + (monotone ? " monotone" : " NOT-monotone") +
                  (nondominated ? " nondominated" : " dominated")};
}

Outcome closed_vs_general() {
  const auto prob = HardCoverageProblem::make(kNet);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double zeta = i / 19.0;
    const auto closed = region_point_closed_form(prob.beta_from_zeta(zeta), prob);
    const auto general = region_point_general(zeta, prob);
    worst = std::max(worst, std::fabs(closed.average - general.average));
  }
  return {worst <= 1e-4, fmt("max|dR_ave|=%.3e", worst)};
}

Outcome soft_anchor() {
  const double s0 = oracle::s0(100.0);
  const double ref = oracle::rho0_multicast(s0, 5);
  const double at0 = region_point_soft(0.0, kNet).point.coverage;
  const double tiny = region_point_soft(1e-12, kNet).point.coverage;
  const auto gammas = default_gamma_grid(41);
  const auto sweep = sweep_soft(gammas, kNet);
  bool monotone = true;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    monotone &= sweep[i].point.coverage >= sweep[i - 1].point.coverage;
    monotone &= sweep[i].point.average <= sweep[i - 1].point.average;
  }
  const bool ok = std::fabs(at0 - ref) <= 1e-8 && std::fabs(tiny - ref) <= 1e-8 && at0 >= 0.95 &&
                  at0 <= 1.15 && monotone;
  return {ok, fmt("R_mul(0+)=%.7f", tiny) + fmt(" oracle=%.7f", ref) +
                  (monotone ? " monotone" : " NOT-monotone")};
}

Outcome power_shift() {
  const auto sol = solve_gamma_for_rmul(1.4, kNet);
  const auto base = unconstrained_allocation(100.0);
  auto below = [](const LayeredAllocation& a) { return a.total_power() - interference_at(a, 0.3); };
  const double a = below(sol.allocation), b = below(base);
  return {a > b && std::fabs(sol.point.coverage - 1.4) <= 1e-8,
          fmt("gamma=%.5f", sol.gamma) + fmt(" below(R_mul=1.4)=%.4f", a) + fmt(" below(base)=%.4f", b)};
}

Outcome miso_reduction() {
  double worst = 0.0;
  for (double g : default_gamma_grid(41)) {
    const auto a = region_point_miso(g, kNet).point;
    const auto b = region_point_soft(g, kNet).point;
    worst = std::max({worst, std::fabs(a.coverage - b.coverage), std::fabs(a.average - b.average)});
  }
  std::vector<double> rmul;
  for (int m : {1, 2, 4}) rmul.push_back(region_point_miso(1.0, {5, 100.0, 0.01, m}).point.coverage);
  const bool increasing = rmul[0] < rmul[1] && rmul[1] < rmul[2];
  return {worst <= 1e-6 && increasing, fmt("max|diff|=%.2e", worst) + fmt(" R_mul(M=1)=%.4f", rmul[0]) +
                                           fmt(" (M=2)=%.4f", rmul[1]) + fmt(" (M=4)=%.4f", rmul[2])};
}

Outcome euler_lagrange() {
  double worst = 0.0;
  auto check = [&](const std::function<double(double)>& w, const std::function<double(double)>& wp,
                   const std::function<double(double)>& interference, double h0, double h1) {
    for (int i = 1; i <= 50; ++i) {
      const double x = h0 + (h1 - h0) * i / 51.0;
      const double d = 1.0 + x * interference(x);
      const double a = x * wp(x) / d;
      const double b = w(x) / (d * d);
      worst = std::max(worst, std::fabs(a + b) / (std::fabs(a) + std::fabs(b)));
    }
  };
  for (double gamma : {0.0, 0.1, 1.0, 10.0}) {
    for (int n : {2, 5, 20}) {
      const auto th = solve_thresholds_sc(gamma, n, 100.0);
      check([&](double x) { return std::exp(-x) + gamma * std::exp(-n * x); },
            [&](double x) { return -std::exp(-x) - gamma * n * std::exp(-n * x); },
            [&](double x) { return i_gamma_sc(x, gamma, n); }, th.h0, th.h1);
    }
  }
  for (int m : {2, 4, 8}) {
    for (double gamma : {0.5, 1.0, 5.0}) {
      const int n = 5;
      const auto th = solve_thresholds_miso(gamma, m, n, 100.0);
      check([&](double x) { return w_fun(x, gamma, m, n); },
            [&](double x) { return w_prime(x, gamma, m, n); },
            [&](double x) { return mu_interference(x, gamma, m, n); }, th.h0, th.h1);
    }
  }
  return {worst <= 1e-8, fmt("max relative residual=%.2e", worst)};
}

Outcome antenna_property() {
  const auto bound = required_antennas(100, 10.0, 0.3, 5.0);
  const auto scheme = single_layer_scheme(10.0, 0.3);
  const NetworkConfig cfg{100, 10.0, 0.0, bound.required_m};
  SimConfig sim{cfg, single_layer(10.0, scheme.threshold), 20000, 131};
  sim.outage_rate = scheme.rate;
  const auto stats = simulate(sim);
  const double success = 1.0 - stats.outage_prob->mean;
  const bool ok = bound.required_m == 131 && stats.r_mul.mean >= 0.99 * scheme.rate && success >= 0.99;
  return {ok, "M=" + std::to_string(bound.required_m) + fmt(" R_sigma=%.5f", scheme.rate) +
                  fmt(" empirical R_mul=%.5f", stats.r_mul.mean) + fmt(" success=%.5f", success)};
}

Outcome oracle_equivalence() {
  struct Case {
    std::string name;
    NetworkConfig cfg;
    LayeredAllocation alloc;
  };
  const NetworkConfig miso_cfg{5, 100.0, 0.01, 2};
  const std::vector<Case> cases{
      {"single-layer", kNet, single_layer(100.0, outage_threshold(kNet))},
      {"rho0", kNet, unconstrained_allocation(100.0)},
      {"soft", kNet, region_point_soft(1.0, kNet).allocation},
      {"miso", miso_cfg, region_point_miso(1.0, miso_cfg).allocation},
  };
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 77;
  for (const auto& c : cases) {
    const auto stats = simulate({c.cfg, c.alloc, 100000, seed++});
    const auto report = compare_analytic(stats, analytic_targets(c.alloc, c.cfg));
    ok &= !report.any_flagged() && report.entries.size() == 2;
    detail += " " + c.name + fmt("(z_ave=%.2f", report.entries[0].z) +
              fmt(", z_mul=%.2f)", report.entries[1].z);
  }
  return {ok, detail.substr(1)};
}

std::string cli_output(std::vector<std::string> args) {
  std::vector<const char*> argv{"mcap"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return rc == 0 ? out.str() : "";
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "mcap-acceptance";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "soft.json").string();
  save_allocation(region_point_soft(1.0, kNet).allocation, path);
  std::vector<std::string> outs;
  for (const char* t : {"1", "4", "8"}) {
    outs.push_back(cli_output({"simulate", "-a", path, "--blocks", "50000", "--seed", "99",
                               "--threads", t, "--outage-rate", "1"}));
  }
  std::filesystem::remove_all(dir);
  const bool ok = !outs[0].empty() && outs[0] == outs[1] && outs[0] == outs[2];
  return {ok, "bytes=" + std::to_string(outs[0].size()) + (ok ? " identical" : " differ")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "unconstrained optimum", 10.0, unconstrained_optimum},
      {2, "hard-coverage endpoints and sweep", 0.0, hard_endpoints},
      {3, "closed form vs general path", 60.0, closed_vs_general},
      {4, "soft-coverage anchor and scalarization", 0.0, soft_anchor},
      {5, "power shift under R_mul = 1.4", 0.0, power_shift},
      {6, "MISO reduction and antenna gain", 0.0, miso_reduction},
      {7, "Euler-Lagrange residuals", 0.0, euler_lagrange},
      {8, "antenna-count property", 0.0, antenna_property},
      {9, "Monte Carlo oracle equivalence", 120.0, oracle_equivalence},
      {10, "determinism across worker counts", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt(" over time limit %.0fs", c.limit_s);
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
