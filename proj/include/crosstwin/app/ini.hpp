#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace crosstwin::app {

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// `[section]` headers and `key = value` lines; lines starting with `#` or `;`
/// are comments (no trailing comments, so values may contain either).
/// Throws ConfigError with the offending line number.
std::vector<IniEntry> parse_ini(const std::string& text);

}  // namespace crosstwin::app
