#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace p2s {

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: temp file in the same
/// directory, then rename. Parent directories are created.
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string_view trim(std::string_view s);
bool is_blank(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Fixed-point rendering with `decimals` digits after the point, half away
/// from zero (so 69.0909 -> "69.1").
std::string format_fixed(double value, int decimals);

/// CamelCase / PascalCase to snake_case ("TriangleNumber" -> "triangle_number").
std::string to_snake_case(std::string_view name);

}  // namespace p2s
