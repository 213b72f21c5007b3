#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace mcscore::cli {

/// 17 significant digits, '.' decimal point; "nan" / "inf" / "-inf".
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// One number per line. Blank lines and '#' lines are skipped; a non-numeric
/// first line is taken as a header.
std::vector<double> read_numbers(const std::filesystem::path& path);

/// `date,value` CSV (any columns, one named `value`).
std::vector<double> read_series(const std::filesystem::path& path);

/// Two numeric columns (mu, sigma) per line, optional header.
std::vector<std::pair<double, double>> read_pairs(const std::filesystem::path& path);

/// ISO 8601 UTC time with millisecond resolution.
std::string utc_timestamp();

}  // namespace mcscore::cli
