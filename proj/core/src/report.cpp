#include "heatlab/report.hpp"

#include <cstdio>
#include <ostream>

namespace heatlab {

std::uint64_t config_hash(const std::string& canonical_text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_artifact_header(std::ostream& os, const std::string& kind,
                           std::uint64_t config_hash, std::uint64_t seed,
                           const std::vector<std::string>& notes) {
  os << "# heatlab " << kind << "\n";
  os << "# config_hash " << hash_hex(config_hash) << "\n";
  os << "# seed " << seed << "\n";
  os << "# conventions: positive Laplacian (-div grad), inner unit normal,"
        " diffusion increments of variance 2*dt per coordinate\n";
  for (const auto& n : notes) os << "# " << n << "\n";
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv_row(std::ostream& os, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ",";
    os << format_double(values[i]);
  }
  os << "\n";
}

} // namespace heatlab
