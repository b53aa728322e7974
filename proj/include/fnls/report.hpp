#pragma once

// Self-describing run outputs.
//
// CSV:  line 1 "# fnls-report v1", line 2 the config echo as one JSON string,
//       line 3 the column header, then one observation per row. Scalar
//       results go to a second file with columns key,value and the same
//       preamble.
// JSON: {"schema_version": 1, "config": {...}, "results": {"columns": [...],
//       "rows": [[...]], "summary": {...}}}.
// Reals are written with 17 significant digits, so parsing an emitted file
// gives back the same doubles.

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace fnls {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCsvMagic = "# fnls-report v1";
inline constexpr const char* kRevision = "fnls 0.1.0";

using Cell = std::variant<double, long long, std::string>;

struct Report {
  /// Config echo plus run metadata (revision, seed, random stream name).
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::map<std::string, Cell> summary;

  bool operator==(const Report& other) const;
};

/// config echo + {"revision", "seed", "random_algorithm"}.
nlohmann::json run_metadata(nlohmann::json echo, std::uint64_t seed);

std::string render_csv(const Report& r);
std::string render_summary_csv(const Report& r);
std::string render_json(const Report& r);

/// Inverse of render_csv combined with render_summary_csv.
Report parse_csv(const std::string& table, const std::string& summary);
Report parse_json(const std::string& text);

/// Writes <dir>/<stem>.json, or <dir>/<stem>.csv plus <dir>/<stem>_summary.csv.
/// Returns the paths written. Throws IoError.
std::vector<std::filesystem::path> emit_report(const Report& r, bool json,
                                               const std::filesystem::path& dir,
                                               const std::string& stem);

/// A real formatted with 17 significant digits ("nan"/"inf" spelled out).
std::string format_real(double v);

}  // namespace fnls
