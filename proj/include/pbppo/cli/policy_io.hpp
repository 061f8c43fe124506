#ifndef PBPPO_CLI_POLICY_IO_HPP_
#define PBPPO_CLI_POLICY_IO_HPP_

#include <string>

#include <json.hpp>

#include "pbppo/harness/config.hpp"
#include "pbppo/rl/actor_critic.hpp"

namespace pbppo::cli {

struct SavedPolicy {
  harness::TrainConfig config;
  rl::ActorCritic policy;
};

nlohmann::json policy_to_json(const rl::ActorCritic& policy, const harness::TrainConfig& config);
SavedPolicy policy_from_json(const nlohmann::json& j);

void save_policy(const std::string& path, const rl::ActorCritic& policy,
                 const harness::TrainConfig& config);
SavedPolicy load_policy(const std::string& path);

}  // namespace pbppo::cli

#endif  // PBPPO_CLI_POLICY_IO_HPP_
