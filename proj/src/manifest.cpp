#include "tcsi/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include "tcsi/error.hpp"
#include "tcsi/keyvalue.hpp"

namespace tcsi {

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw std::runtime_error("SHA-1 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string git_blob_hash_file(const std::filesystem::path& path) {
  return git_blob_hash(read_text_file(path));
}

std::string iso8601_basic_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::filesystem::path make_results_dir(const std::filesystem::path& out, std::string_view cycle,
                                       std::string_view fault, std::string_view stamp) {
  const std::string base = std::string(cycle) + "_" + std::string(fault) + "_" + std::string(stamp);
  std::filesystem::path dir = out / base;
  for (int k = 2; std::filesystem::exists(dir); ++k) dir = out / (base + "-" + std::to_string(k));
  std::filesystem::create_directories(dir);
  return dir;
}

void Manifest::write(const std::filesystem::path& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << "command: " << command << '\n';
  for (const auto& [k, v] : entries) f << k << ": " << v << '\n';
  for (const auto& [k, v] : inputs) f << "input " << k << ": " << v << '\n';
}

}  // namespace tcsi
