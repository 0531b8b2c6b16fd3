#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tcsi {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

// "key = value" per line; blank lines and '#' comments skipped. Throws
// ConfigError on a line without '=' or with an empty key.
std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view origin);
std::string read_text_file(const std::filesystem::path& path);

double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);
std::string trim(std::string_view text);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace tcsi
