#include "mcap/allocation_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mcap/hard_coverage.hpp"
#include "mcap/miso.hpp"
#include "mcap/soft_coverage.hpp"

namespace mcap {

using nlohmann::json;

namespace {

json piece_to_json(const DensityFamily& piece) {
  if (const auto* grid = dynamic_cast<const GridDensity*>(&piece)) {
    json samples = json::array();
    for (const auto& s : grid->samples()) samples.push_back({{"h", s.h}, {"rho", s.rho}});
    return {{"grid", samples}};
  }
  json params = json::object();
  for (const auto& [key, value] : piece.params()) params[key] = value;
  return {{"family", piece.name()}, {"params", params}};
}

int as_count(const json& params, const char* key) {
  const double v = params.at(key).get<double>();
  const int n = static_cast<int>(v);
  if (static_cast<double>(n) != v) {
    throw std::runtime_error(std::string("parameter '") + key + "' must be an integer");
  }
  return n;
}

DensityPtr piece_from_json(const json& j) {
  if (j.contains("grid")) {
    std::vector<GridDensity::Sample> samples;
    for (const auto& s : j.at("grid")) {
      samples.push_back({s.at("h").get<double>(), s.at("rho").get<double>()});
    }
    return std::make_shared<const GridDensity>(std::move(samples));
  }
  const auto family = j.at("family").get<std::string>();
  const json& p = j.at("params");
  if (family == "rho0") {
    return std::make_shared<const Rho0Density>(p.at("lo").get<double>());
  }
  if (family == "hard_tilted") {
    return std::make_shared<const TiltedHardDensity>(
        p.at("lambda").get<double>(), p.at("lo").get<double>(), p.at("hi").get<double>());
  }
  if (family == "soft") {
    return std::make_shared<const SoftDensity>(p.at("gamma").get<double>(),
                                               as_count(p, "users"),
                                               p.at("lo").get<double>(),
                                               p.at("hi").get<double>());
  }
  if (family == "miso") {
    return std::make_shared<const MisoDensity>(
        p.at("gamma").get<double>(), as_count(p, "antennas"), as_count(p, "users"),
        p.at("lo").get<double>(), p.at("hi").get<double>());
  }
  throw std::runtime_error("unknown density family '" + family + "'");
}

}  // namespace

std::string allocation_to_json(const LayeredAllocation& alloc, int indent) {
  json doc;
  doc["budget"] = alloc.budget;
  doc["impulses"] = json::array();
  for (const auto& imp : alloc.impulses) {
    doc["impulses"].push_back({{"gain", imp.gain}, {"power", imp.power}});
  }
  if (alloc.pieces.empty()) {
    doc["density"] = nullptr;
  } else if (alloc.pieces.size() == 1) {
    doc["density"] = piece_to_json(*alloc.pieces.front());
  } else {
    doc["density"] = json::array();
    for (const auto& piece : alloc.pieces) doc["density"].push_back(piece_to_json(*piece));
  }
  return doc.dump(indent);
}

LayeredAllocation allocation_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("allocation file is not valid JSON: ") + e.what());
  }
  try {
    LayeredAllocation alloc;
    alloc.budget = doc.at("budget").get<double>();
    if (doc.contains("impulses")) {
      for (const auto& imp : doc.at("impulses")) {
        alloc.impulses.push_back({imp.at("gain").get<double>(), imp.at("power").get<double>()});
      }
    }
    if (doc.contains("density") && !doc.at("density").is_null()) {
      const json& d = doc.at("density");
      if (d.is_array()) {
        for (const auto& piece : d) alloc.pieces.push_back(piece_from_json(piece));
      } else {
        alloc.pieces.push_back(piece_from_json(d));
      }
    }
    return alloc;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed allocation document: ") + e.what());
  }
}

void save_allocation(const LayeredAllocation& alloc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << allocation_to_json(alloc) << '\n';
}

LayeredAllocation load_allocation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return allocation_from_json(buf.str());
}

}  // namespace mcap
