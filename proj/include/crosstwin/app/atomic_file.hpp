#pragma once

#include <filesystem>
#include <string>

namespace crosstwin::app {

/// Writes to a sibling temporary file and renames it over `path`, creating
/// parent directories as needed.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Throws ConfigError naming the path when it cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace crosstwin::app
