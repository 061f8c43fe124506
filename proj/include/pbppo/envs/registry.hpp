#ifndef PBPPO_ENVS_REGISTRY_HPP_
#define PBPPO_ENVS_REGISTRY_HPP_

#include <memory>
#include <string>
#include <vector>

#include "pbppo/envs/env.hpp"

namespace pbppo::envs {

// Names: gridnav, pendulum, pointnav-easy, pointnav-medium, pointnav-hard.
// For pointnav, a non-empty layout_path replaces the built-in geometry.
std::unique_ptr<Env> make_env(const std::string& name, const std::string& layout_path = "");

const std::vector<std::string>& env_names();
bool is_known_env(const std::string& name);

}  // namespace pbppo::envs

#endif  // PBPPO_ENVS_REGISTRY_HPP_
