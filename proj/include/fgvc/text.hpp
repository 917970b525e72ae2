#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fgvc::text {

/// Lines of a text file without their LF terminators. A missing file raises
/// MissingFile; a single trailing LF does not produce an empty last line.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories. IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits on runs of ' ' and '\t'.
std::vector<std::string_view> split_fields(std::string_view line);

/// Splits once at the first ' ' (for "<id> <rest of line>" records).
std::optional<std::pair<std::string_view, std::string_view>> split_first(std::string_view line);

/// Whole-token parses; nullopt on trailing garbage, overflow or non-finite input.
std::optional<std::int64_t> parse_int(std::string_view token);
std::optional<double> parse_double(std::string_view token);

/// Shortest decimal that round-trips to the same double.
std::string format_shortest(double value);

/// Fixed notation with `decimals` digits; never renders a negative zero.
std::string format_fixed(double value, int decimals);

/// printf-style %.<digits>g, locale independent.
std::string format_general(double value, int significant_digits);

} // namespace fgvc::text
