#include "pbppo/cli/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <memory>

#include "pbppo/cli/metrics_io.hpp"
#include "pbppo/error.hpp"

#ifndef PBPPO_VERSION
#define PBPPO_VERSION "0.0.0"
#endif

namespace pbppo::cli {

std::string library_version() { return PBPPO_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json file_inventory(const std::string& dir, const std::vector<std::string>& names) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& name : names) {
    const std::string bytes = read_file((std::filesystem::path(dir) / name).string());
    files.push_back({{"name", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  }
  return files;
}

VerifyReport verify_manifest(const std::string& dir) {
  VerifyReport report;
  const auto path = (std::filesystem::path(dir) / kManifestName).string();
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (!m.contains("files") || !m["files"].is_array()) {
    throw IoError(path + ": no file inventory");
  }
  for (const auto& entry : m["files"]) {
    const std::string name = entry.value("name", "");
    const auto file = std::filesystem::path(dir) / name;
    if (!std::filesystem::exists(file)) {
      report.ok = false;
      report.problems.push_back(name + ": missing");
      continue;
    }
    const std::string actual = sha256_file(file.string());
    if (actual != entry.value("sha256", "")) {
      report.ok = false;
      report.problems.push_back(name + ": digest mismatch");
    }
  }
  return report;
}

}  // namespace pbppo::cli
