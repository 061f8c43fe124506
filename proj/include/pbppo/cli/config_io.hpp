#ifndef PBPPO_CLI_CONFIG_IO_HPP_
#define PBPPO_CLI_CONFIG_IO_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbppo/harness/config.hpp"

namespace pbppo::cli {

inline constexpr const char* kEnvPrefix = "PBPPO_";

// Every configurable key, in the order used for help text and echoes. The
// same names serve as command-line flags (--<key>), config-file keys and,
// upper-cased with '-' mapped to '_', environment variables (PBPPO_<KEY>).
const std::vector<std::string>& config_keys();
std::string config_help(const std::string& key);

// Full config as a flat JSON object keyed by config_keys().
nlohmann::json config_to_json(const harness::TrainConfig& config);

// Applies the keys present in j on top of base. Unknown keys and
// ill-typed values throw ConfigError naming the key.
harness::TrainConfig apply_json(harness::TrainConfig base, const nlohmann::json& j);

// Applies one textual value (flag or environment variable form).
void apply_text(harness::TrainConfig& config, const std::string& key, const std::string& text);

struct ConfigSources {
  std::optional<std::string> config_file;
  std::map<std::string, std::string> environment;  // PBPPO_* variables
  std::map<std::string, std::string> flags;        // key -> text
};

// defaults < config file < environment < flags; the result is validated.
harness::TrainConfig resolve_config(const ConfigSources& sources);

// Collects PBPPO_* entries from the process environment.
std::map<std::string, std::string> read_prefixed_environment();

}  // namespace pbppo::cli

#endif  // PBPPO_CLI_CONFIG_IO_HPP_
