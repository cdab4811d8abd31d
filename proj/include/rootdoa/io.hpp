#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rootdoa/common.hpp"
#include "rootdoa/model.hpp"

namespace rootdoa {

/// Formats as "re+imj" / "re-imj" with the given significant digits.
std::string format_complex(Complex c, int digits = 17);

/// Accepts "re+imj", "re-imj", "re", "imj" and "j"-suffixed forms with
/// exponents. Throws ConfigError on anything else.
Complex parse_complex(std::string_view text);

/// Comma-separated "re+imj" list, ascending order.
std::vector<Complex> parse_complex_list(std::string_view text);

nlohmann::json scenario_to_json(const Scenario& s);
/// Throws ConfigError for missing keys or wrong types, DomainError for
/// values that break Scenario invariants.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

// Snapshot files. CSV: one row per sensor, one column per snapshot.
// Binary: "SNAP", u32 N, u32 T, then N*T little-endian f64 (re, im) pairs,
// row-major by sensor.
void write_snapshots_csv(std::ostream& os, const CMatrix& x);
void write_snapshots_binary(std::ostream& os, const CMatrix& x);
CMatrix read_snapshots_csv(std::istream& is);
CMatrix read_snapshots_binary(std::istream& is);

/// Dispatches on the leading magic bytes.
CMatrix load_snapshots(const std::filesystem::path& path);

}  // namespace rootdoa
