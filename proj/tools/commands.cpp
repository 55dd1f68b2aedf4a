#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcap/allocation_io.hpp"
#include "mcap/errors.hpp"
#include "mcap/hard_coverage.hpp"
#include "mcap/miso.hpp"
#include "mcap/montecarlo.hpp"
#include "mcap/soft_coverage.hpp"

namespace mcap::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest round-trip form, independent of the global locale.
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::int64_t v) { return std::to_string(v); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

class CsvWriter {
 public:
  void manifest(const std::string& key, const std::string& value) {
    std::string line = value;
    std::replace(line.begin(), line.end(), '\n', ' ');
    text_ << "# " << key << ": " << line << "\n";
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text_ << ',';
      text_ << csv_field(fields[i]);
    }
    text_ << "\n";
  }
  std::string str() const { return text_.str(); }

 private:
  std::ostringstream text_;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

struct NetworkFlags {
  int users = 5;
  double power = 100.0;
  double eps = 0.01;
  int antennas = 1;

  NetworkConfig config() const {
    NetworkConfig cfg{users, power, eps, antennas};
    cfg.check();
    return cfg;
  }
};

void add_network_flags(CLI::App* app, NetworkFlags& net, bool with_eps) {
  app->add_option("--users,-n", net.users, "number of users N")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--power,-p", net.power, "power budget (linear SNR)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  if (with_eps) {
    app->add_option("--epsilon", net.eps, "outage probability")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
  }
  app->add_option("--antennas,-m", net.antennas, "transmit antennas M")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_config(CLI::App* app) {
  // Expanded by expand_config before parsing; registered here for --help.
  app->add_option("--config", "key=value file; command-line flags take precedence");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads key=value lines into --key=value arguments. '#' and ';' start comments;
// [section] lines are ignored.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    std::replace(key.begin(), key.end(), '_', '-');
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Splices the contents of a --config file in front of the subcommand's own
// arguments, so explicit flags override file values.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::size_t sub = 1;
  while (sub < args.size() && !args[sub].empty() && args[sub][0] == '-') ++sub;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    std::string path;
    std::size_t used = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      used = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      used = 1;
    } else {
      continue;
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
               args.begin() + static_cast<std::ptrdiff_t>(i + used));
    const auto extra = read_config(path);
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub + 1), extra.begin(), extra.end());
    break;
  }
  return args;
}

// region -------------------------------------------------------------------

struct RegionFlags {
  std::string mode = "hard";
  NetworkFlags net;
  int grid = 0;
  double gamma_min = 1e-3;
  double gamma_max = 1e3;
  bool bits = false;
  std::string out;
};

std::vector<double> linspace01(int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[i] = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
  return v;
}

std::string cmd_region(const RegionFlags& f) {
  NetworkConfig cfg = f.net.config();
  std::vector<CapacityPoint> points;
  std::string parameter = "gamma";
  int grid = f.grid;

  if (f.mode == "hard") {
    if (cfg.antennas != 1) throw UsageError("hard mode is single-antenna; drop --antennas");
    const auto prob = HardCoverageProblem::make(cfg);
    if (grid == 0) grid = 50;
    const auto values = linspace01(grid);
    points = sweep_hard(values, prob);
    parameter = prob.closed_form_applies() ? "beta" : "zeta";
  } else {
    if (grid == 0) grid = 41;
    const auto gammas = default_gamma_grid(grid, f.gamma_min, f.gamma_max);
    if (f.mode == "soft") {
      if (cfg.antennas != 1) throw UsageError("soft mode is single-antenna; use --mode miso");
      for (const auto& s : sweep_soft(gammas, cfg)) points.push_back(s.point);
    } else {
      for (const auto& s : sweep_miso(gammas, cfg)) points.push_back(s.point);
    }
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const CapacityPoint& a, const CapacityPoint& b) {
                     return a.parameter < b.parameter;
                   });

  const double scale = f.bits ? 1.0 / std::log(2.0) : 1.0;
  const std::string unit = f.bits ? "bits" : "nats";
  CsvWriter csv;
  csv.manifest("command", "region");
  csv.manifest("version", kVersion);
  csv.manifest("mode", f.mode);
  csv.manifest("users", fmt(std::int64_t{cfg.users}));
  csv.manifest("power", fmt(cfg.power));
  if (f.mode == "hard") csv.manifest("epsilon", fmt(cfg.eps));
  csv.manifest("antennas", fmt(std::int64_t{cfg.antennas}));
  csv.manifest("grid", fmt(std::int64_t{grid}));
  if (f.mode != "hard") {
    csv.manifest("gamma_min", fmt(f.gamma_min));
    csv.manifest("gamma_max", fmt(f.gamma_max));
  }
  csv.manifest("parameter", parameter);
  csv.manifest("units", unit);
  csv.manifest("output", f.out.empty() ? "-" : f.out);
  csv.row({"parameter", "coverage_" + unit, "average_" + unit});
  for (const auto& p : points) {
    csv.row({fmt(p.parameter), fmt(p.coverage * scale), fmt(p.average * scale)});
  }
  return csv.str();
}

// allocation ---------------------------------------------------------------

struct AllocationFlags {
  std::string mode = "soft";
  NetworkFlags net;
  std::optional<double> beta;
  std::optional<double> zeta;
  std::optional<double> gamma;
  std::optional<double> target_rmul;
  std::string out;
  std::string density_csv;
};

std::string density_samples(const LayeredAllocation& alloc, const AllocationFlags& f) {
  std::vector<double> hs;
  constexpr int kSamples = 2048;
  for (const auto& piece : alloc.pieces) {
    const double lo = piece->lo();
    const double hi = piece->hi();
    const double ratio = hi / lo;
    for (int i = 0; i < kSamples; ++i) {
      const double t = static_cast<double>(i) / (kSamples - 1);
      hs.push_back(i == kSamples - 1 ? hi : lo * std::pow(ratio, t));
    }
  }
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());

  CsvWriter csv;
  csv.manifest("command", "allocation");
  csv.manifest("version", kVersion);
  csv.manifest("mode", f.mode);
  csv.manifest("power", fmt(alloc.budget));
  csv.manifest("output", f.density_csv);
  csv.row({"h", "rho"});
  for (double h : hs) csv.row({fmt(h), fmt(density_at(alloc, h))});
  return csv.str();
}

void cmd_allocation(const AllocationFlags& f, std::ostream& out) {
  const int chosen = (f.beta ? 1 : 0) + (f.zeta ? 1 : 0) + (f.gamma ? 1 : 0) +
                     (f.target_rmul ? 1 : 0);
  if (chosen != 1) {
    throw UsageError("give exactly one of --beta, --zeta, --gamma, --target-rmul");
  }
  NetworkConfig cfg = f.net.config();
  LayeredAllocation alloc;
  CapacityPoint point;

  if (f.mode == "hard") {
    if (!f.beta && !f.zeta) throw UsageError("hard mode takes --beta or --zeta");
    if (cfg.antennas != 1) throw UsageError("hard mode is single-antenna; drop --antennas");
    const auto prob = HardCoverageProblem::make(cfg);
    if (f.beta) {
      alloc = build_allocation_hard(*f.beta, prob);
      point = region_point_closed_form(*f.beta, prob);
    } else {
      const auto sol = solve_hard_general(*f.zeta, prob);
      alloc = build_allocation_general(sol, prob);
      point = sol.point;
    }
  } else if (f.mode == "soft") {
    if (!f.gamma && !f.target_rmul) throw UsageError("soft mode takes --gamma or --target-rmul");
    if (cfg.antennas != 1) throw UsageError("soft mode is single-antenna; use --mode miso");
    const auto sol =
        f.gamma ? region_point_soft(*f.gamma, cfg) : solve_gamma_for_rmul(*f.target_rmul, cfg);
    alloc = sol.allocation;
    point = sol.point;
  } else {
    if (!f.gamma) throw UsageError("miso mode takes --gamma");
    const auto sol = region_point_miso(*f.gamma, cfg);
    alloc = sol.allocation;
    point = sol.point;
  }

  const std::string json = allocation_to_json(alloc) + "\n";
  emit(json, f.out, out);
  if (!f.density_csv.empty()) emit(density_samples(alloc, f), f.density_csv, out);
  if (!f.out.empty() && f.out != "-") {
    CsvWriter csv;
    csv.row({"parameter", "coverage_nats", "average_nats"});
    csv.row({fmt(point.parameter), fmt(point.coverage), fmt(point.average)});
    out << csv.str();
  }
}

// simulate -----------------------------------------------------------------

struct SimulateFlags {
  std::string allocation;
  int users = 5;
  int antennas = 1;
  std::int64_t blocks = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
  std::optional<double> outage_rate;
  std::optional<double> outage_prob;
  std::string out;
};

std::string cmd_simulate(const SimulateFlags& f) {
  SimConfig sim;
  sim.allocation = load_allocation(f.allocation);
  sim.cfg = NetworkConfig{f.users, sim.allocation.budget, 0.0, f.antennas};
  sim.cfg.check();
  sim.blocks = f.blocks;
  sim.seed = f.seed;
  sim.threads = f.threads;
  sim.outage_rate = f.outage_rate;

  const EmpiricalStats stats = simulate(sim);
  AnalyticTargets targets = analytic_targets(sim.allocation, sim.cfg);
  targets.outage_prob = f.outage_prob;
  const ComparisonReport report = compare_analytic(stats, targets);

  CsvWriter csv;
  csv.manifest("command", "simulate");
  csv.manifest("version", kVersion);
  csv.manifest("allocation", f.allocation);
  csv.manifest("users", fmt(std::int64_t{f.users}));
  csv.manifest("antennas", fmt(std::int64_t{f.antennas}));
  csv.manifest("power", fmt(sim.cfg.power));
  csv.manifest("blocks", fmt(f.blocks));
  csv.manifest("seed", std::to_string(f.seed));
  if (f.outage_rate) csv.manifest("outage_rate", fmt(*f.outage_rate));
  csv.manifest("units", "nats");
  csv.manifest("output", f.out.empty() ? "-" : f.out);

  std::vector<std::string> header{"blocks"};
  std::vector<std::string> row{fmt(stats.blocks)};
  auto add = [&](const std::string& name, const Estimate& e) {
    header.insert(header.end(), {name, name + "_se", name + "_analytic", name + "_z"});
    const auto it = std::find_if(report.entries.begin(), report.entries.end(),
                                 [&](const ZScore& z) { return z.name == name; });
    row.push_back(fmt(e.mean));
    row.push_back(fmt(e.std_error));
    row.push_back(it == report.entries.end() ? "" : fmt(it->analytic));
    row.push_back(it == report.entries.end() ? "" : fmt(it->z));
  };
  add("r_ave", stats.r_ave);
  add("r_mul", stats.r_mul);
  if (stats.outage_prob) add("outage_prob", *stats.outage_prob);
  header.push_back("flagged");
  row.push_back(report.any_flagged() ? "1" : "0");
  csv.row(header);
  csv.row(row);
  return csv.str();
}

// antennas -----------------------------------------------------------------

struct AntennaFlags {
  int users = 100;
  double power = 10.0;
  double sigma = 0.0;
  double slack = 5.0;
  std::int64_t simulate_blocks = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
};

std::string cmd_antennas(const AntennaFlags& f) {
  const AntennaBound bound = required_antennas(f.users, f.power, f.sigma, f.slack);
  const SingleLayerScheme scheme = single_layer_scheme(f.power, f.sigma);
  const int m = bound.required_m;

  std::vector<std::string> header{"sigma",         "sigma_prime",    "slack",
                                  "required_m",    "r_sigma",        "predicted_rmul",
                                  "exact_rmul",    "ergodic_bound"};
  std::vector<std::string> row{fmt(bound.sigma),
                               fmt(bound.sigma_prime),
                               fmt(bound.slack),
                               fmt(std::int64_t{m}),
                               fmt(scheme.rate),
                               fmt(predicted_rmul_single_layer(f.users, m, f.power, f.sigma)),
                               fmt(exact_rmul_single_layer(f.users, m, f.power, f.sigma)),
                               fmt(ergodic_upper_bound(f.power))};

  if (f.simulate_blocks > 0) {
    SimConfig sim;
    sim.cfg = NetworkConfig{f.users, f.power, 0.0, m};
    sim.allocation = single_layer(f.power, scheme.threshold);
    sim.blocks = f.simulate_blocks;
    sim.seed = f.seed;
    sim.threads = f.threads;
    sim.outage_rate = scheme.rate;
    const EmpiricalStats stats = simulate(sim);
    header.insert(header.end(), {"blocks", "empirical_rmul", "empirical_rmul_se", "success_rate",
                                 "success_rate_se"});
    row.insert(row.end(), {fmt(stats.blocks), fmt(stats.r_mul.mean), fmt(stats.r_mul.std_error),
                           fmt(1.0 - stats.outage_prob->mean),
                           fmt(stats.outage_prob->std_error)});
  }

  CsvWriter csv;
  csv.manifest("command", "antennas");
  csv.manifest("version", kVersion);
  csv.manifest("users", fmt(std::int64_t{f.users}));
  csv.manifest("power", fmt(f.power));
  if (f.simulate_blocks > 0) {
    csv.manifest("simulate_blocks", fmt(f.simulate_blocks));
    csv.manifest("seed", std::to_string(f.seed));
  }
  csv.manifest("units", "nats");
  csv.manifest("output", f.out.empty() ? "-" : f.out);
  csv.row(header);
  csv.row(row);
  return csv.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layered multicast power allocation: capacity regions and Monte Carlo checks",
               "mcap"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  RegionFlags region_flags;
  auto* region = app.add_subcommand("region", "sweep a capacity-region boundary to CSV");
  add_config(region);
  region->add_option("--mode", region_flags.mode, "hard, soft or miso")
      ->capture_default_str()
      ->check(CLI::IsMember({"hard", "soft", "miso"}));
  add_network_flags(region, region_flags.net, true);
  region->add_option("--grid", region_flags.grid,
                     "sweep points (default 50 for hard, 41 for soft and miso)")
      ->check(CLI::Range(2, 1000000));
  region->add_option("--gamma-min", region_flags.gamma_min)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  region->add_option("--gamma-max", region_flags.gamma_max)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  region->add_flag("--bits", region_flags.bits, "report rates in bits instead of nats");
  region->add_option("--out,-o", region_flags.out, "output CSV (default stdout)");

  AllocationFlags alloc_flags;
  auto* allocation = app.add_subcommand("allocation", "write one optimal allocation as JSON");
  add_config(allocation);
  allocation->add_option("--mode", alloc_flags.mode, "hard, soft or miso")
      ->capture_default_str()
      ->check(CLI::IsMember({"hard", "soft", "miso"}));
  add_network_flags(allocation, alloc_flags.net, true);
  allocation->add_option("--beta", alloc_flags.beta, "hard: fraction of power in the outage layer")
      ->check(CLI::Range(0.0, 1.0));
  allocation->add_option("--zeta", alloc_flags.zeta, "hard: coverage as a fraction of C_eps")
      ->check(CLI::Range(0.0, 1.0));
  allocation->add_option("--gamma", alloc_flags.gamma, "soft/miso: scalarization weight")
      ->check(CLI::NonNegativeNumber);
  allocation->add_option("--target-rmul", alloc_flags.target_rmul,
                         "soft: expected multicast rate to reach (nats)");
  allocation->add_option("--out,-o", alloc_flags.out, "allocation JSON (default stdout)");
  allocation->add_option("--density-csv", alloc_flags.density_csv, "also write (h, rho) samples");

  SimulateFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo check of an allocation file");
  add_config(sim);
  sim->add_option("--allocation,-a", sim_flags.allocation, "allocation JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--users,-n", sim_flags.users)->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--antennas,-m", sim_flags.antennas)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim->add_option("--blocks", sim_flags.blocks)->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_flags.seed)->capture_default_str();
  sim->add_option("--threads", sim_flags.threads, "workers; 0 reads MCAP_THREADS")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--outage-rate", sim_flags.outage_rate,
                  "count blocks whose worst-user rate falls below this")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--outage-prob", sim_flags.outage_prob,
                  "expected outage probability to compare against")
      ->check(CLI::Range(0.0, 1.0));
  sim->add_option("--out,-o", sim_flags.out, "output CSV (default stdout)");

  AntennaFlags ant_flags;
  auto* ant = app.add_subcommand("antennas", "antenna count for a near loss-free single layer");
  add_config(ant);
  ant->add_option("--users,-n", ant_flags.users)->capture_default_str()->check(CLI::PositiveNumber);
  ant->add_option("--power,-p", ant_flags.power)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ant->add_option("--sigma", ant_flags.sigma, "tolerated rate gap (nats)")->required();
  ant->add_option("--slack", ant_flags.slack)->capture_default_str()->check(CLI::PositiveNumber);
  ant->add_option("--simulate-blocks", ant_flags.simulate_blocks)
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  ant->add_option("--seed", ant_flags.seed)->capture_default_str();
  ant->add_option("--threads", ant_flags.threads)
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  ant->add_option("--out,-o", ant_flags.out, "output CSV (default stdout)");

  try {
    const auto args = expand_config(argc, argv);
    std::vector<const char*> ptrs;
    for (const auto& a : args) ptrs.push_back(a.c_str());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (region->parsed()) {
      emit(cmd_region(region_flags), region_flags.out, out);
    } else if (allocation->parsed()) {
      cmd_allocation(alloc_flags, out);
    } else if (sim->parsed()) {
      emit(cmd_simulate(sim_flags), sim_flags.out, out);
    } else if (ant->parsed()) {
      emit(cmd_antennas(ant_flags), ant_flags.out, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const OutOfRangeError& e) {
    err << "error: " << e.what() << " [" << fmt(e.lo()) << ", " << fmt(e.hi()) << "]\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mcap::cli
