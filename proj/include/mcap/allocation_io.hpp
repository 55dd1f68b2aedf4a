#pragma once

#include <filesystem>
#include <string>

#include "mcap/layered_code.hpp"

namespace mcap {

/// JSON allocation documents.
///
///   {"budget": P,
///    "impulses": [{"gain": h, "power": p}, ...],
///    "density": {"family": name, "params": {...}}
///             | {"grid": [{"h": h, "rho": r}, ...]}
///             | [piece, piece, ...]          (several pieces)
///             | null}                        (no continuous layers)
///
/// Families: rho0 {lo}, hard_tilted {lambda, lo, hi}, soft {gamma, users, lo,
/// hi}, miso {gamma, antennas, users, lo, hi}. Gains and powers are linear.
std::string allocation_to_json(const LayeredAllocation& alloc, int indent = 2);

/// Throws std::runtime_error (or a DomainError from the family constructors)
/// on malformed documents.
LayeredAllocation allocation_from_json(const std::string& text);

void save_allocation(const LayeredAllocation& alloc, const std::filesystem::path& path);
LayeredAllocation load_allocation(const std::filesystem::path& path);

}  // namespace mcap
