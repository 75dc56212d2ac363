#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ctxslam {

// Throws ParseError when the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

// Shortest round-trip decimal form of a double; stable across runs.
std::string format_double(double v);

}  // namespace ctxslam
