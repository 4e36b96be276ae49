#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace heatlab {

/// FNV-1a hash of the canonical config text; stamped into output headers so
/// artifacts are traceable to the exact run configuration.
std::uint64_t config_hash(const std::string& canonical_text);
std::string hash_hex(std::uint64_t h);

/// Self-describing artifact header: '#'-prefixed lines with the tool name,
/// config hash, seed, and free-form notes (units, sign conventions).
void write_artifact_header(std::ostream& os, const std::string& kind,
                           std::uint64_t config_hash, std::uint64_t seed,
                           const std::vector<std::string>& notes);

/// One CSV row with fixed 17-digit formatting (bit-stable reruns).
void write_csv_row(std::ostream& os, const std::vector<double>& values);

std::string format_double(double v);

} // namespace heatlab
