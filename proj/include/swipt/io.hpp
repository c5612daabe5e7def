#pragma once

// Serialization: boundary CSV files, JSON result documents with provenance,
// modulation sweep rows, and atomic file output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swipt/capacity.hpp"
#include "swipt/core.hpp"
#include "swipt/modulation.hpp"
#include "swipt/regions.hpp"
#include "swipt/simkit.hpp"

namespace swipt::io {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kBoundaryHeader = "scheme,receiver,rate_bits,energy_units";
inline constexpr const char* kModulationHeader = "distance_m,receiver,m,alpha,rho,rate_bits";

/// %.17g: round-trips every double.
std::string format_double(double v);

std::string boundary_csv(const std::vector<REBoundary>& curves);
/// Groups consecutive rows with the same (scheme, receiver) into one curve.
std::vector<REBoundary> parse_boundary_csv(const std::string& text);

json to_json(const REBoundary& b);
REBoundary boundary_from_json(const json& j);

struct ModulationRow {
  double distance_m = 0.0;
  std::string receiver;  // "separated" or "integrated"
  modulation::ModulationPlan plan;
};

std::string modulation_csv(const std::vector<ModulationRow>& rows);

json to_json(const LinkParams& lp);
json to_json(const regions::P0Solution& s);
json to_json(const modulation::ModulationPlan& p);
json to_json(const capacity::MiEstimate& e);
json to_json(const capacity::CnlUpper& u);
json to_json(const simkit::SerEstimate& e);
json to_json(const simkit::QamSimResult& r);
json to_json(const simkit::RectifierResult& r);

struct Provenance {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> timestamp;  // ISO 8601 UTC
};

/// SOURCE_DATE_EPOCH when set, otherwise the wall clock if `wall_clock`,
/// otherwise empty (keeps output byte-reproducible).
std::optional<std::string> provenance_timestamp(bool wall_clock);

/// {inputs, outputs, provenance{seed, version, timestamp}}
json document(json inputs, json outputs, const Provenance& prov);

/// Writes through a sibling temp file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace swipt::io
