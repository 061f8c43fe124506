#ifndef PBPPO_CLI_MANIFEST_HPP_
#define PBPPO_CLI_MANIFEST_HPP_

#include <string>
#include <vector>

#include <json.hpp>

namespace pbppo::cli {

inline constexpr const char* kManifestName = "manifest.json";

std::string library_version();

// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// ISO-8601 UTC with seconds, e.g. 2024-01-31T12:00:05Z.
std::string utc_timestamp();

// Adds {name, bytes, sha256} entries for the named files under dir.
nlohmann::json file_inventory(const std::string& dir, const std::vector<std::string>& names);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
};

// Recomputes every inventoried digest under dir.
VerifyReport verify_manifest(const std::string& dir);

}  // namespace pbppo::cli

#endif  // PBPPO_CLI_MANIFEST_HPP_
