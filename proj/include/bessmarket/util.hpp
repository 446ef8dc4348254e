#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bessmarket {

/// Shortest representation that round-trips the exact double value.
std::string format_double(double v);

/// Strict full-match decimal parse (dot separator, optional sign/exponent).
std::optional<double> parse_double(std::string_view text);

std::vector<std::string_view> split_csv_line(std::string_view line);

/// 64-bit FNV-1a, rendered as 16 hex digits. Used for config and dataset
/// fingerprints in output metadata.
std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

std::string read_file(const std::string& path);          // throws Error(io_error)
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace bessmarket
