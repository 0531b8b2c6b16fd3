#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tcsi {

// Hex SHA-1 of "blob <size>\0<content>", as git hash-object prints it.
std::string git_blob_hash(std::string_view content);
std::string git_blob_hash_file(const std::filesystem::path& path);

// UTC timestamp in ISO-8601 basic form, e.g. 20261015T083000Z.
std::string iso8601_basic_utc();

// <out>/<Cycle>_<Fault>_<timestamp>, suffixed -2, -3, ... if it exists.
std::filesystem::path make_results_dir(const std::filesystem::path& out, std::string_view cycle,
                                       std::string_view fault, std::string_view stamp);

struct Manifest {
  std::string command;  // reproducible command line
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::pair<std::string, std::string>> inputs;  // name -> blob hash

  void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
  void add_input(std::string name, std::string hash) { inputs.emplace_back(std::move(name), std::move(hash)); }
  void write(const std::filesystem::path& path) const;
};

}  // namespace tcsi
