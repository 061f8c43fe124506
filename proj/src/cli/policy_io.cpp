#include "pbppo/cli/policy_io.hpp"

#include <algorithm>

#include "pbppo/cli/config_io.hpp"
#include "pbppo/cli/metrics_io.hpp"
#include "pbppo/envs/registry.hpp"
#include "pbppo/error.hpp"

namespace pbppo::cli {

namespace {

using nlohmann::json;

json params_to_json(const nn::ParameterSet& p) {
  std::vector<std::size_t> sizes;
  for (std::size_t k = 0; k < p.num_layers(); ++k) {
    if (k == 0) sizes.push_back(p.layer(k).in);
    sizes.push_back(p.layer(k).out);
  }
  const auto v = p.values();
  return {{"sizes", sizes}, {"extra", p.extra_size()},
          {"values", std::vector<double>(v.begin(), v.end())}};
}

nn::ParameterSet params_from_json(const json& j) {
  const auto sizes = j.at("sizes").get<std::vector<std::size_t>>();
  if (sizes.size() < 2) throw IoError("policy file: network needs at least one layer");
  auto p = nn::ParameterSet::mlp(sizes, j.at("extra").get<std::size_t>());
  const auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != p.size()) throw IoError("policy file: parameter count mismatch");
  std::copy(values.begin(), values.end(), p.values().begin());
  return p;
}

}  // namespace

json policy_to_json(const rl::ActorCritic& policy, const harness::TrainConfig& config) {
  return {{"format", "pbppo-policy"},
          {"format_version", 1},
          {"config", config_to_json(config)},
          {"action",
           {{"discrete", policy.spec.discrete},
            {"count", policy.spec.count},
            {"low", policy.spec.low},
            {"high", policy.spec.high}}},
          {"policy", params_to_json(policy.policy)},
          {"value", params_to_json(policy.value)}};
}

SavedPolicy policy_from_json(const json& j) {
  try {
    if (j.value("format", "") != "pbppo-policy") throw IoError("not a policy file");
    SavedPolicy out;
    out.config = apply_json(harness::TrainConfig{}, j.at("config"));
    const auto& a = j.at("action");
    out.policy.spec.discrete = a.at("discrete").get<bool>();
    out.policy.spec.count = a.at("count").get<std::size_t>();
    out.policy.spec.low = a.at("low").get<std::vector<double>>();
    out.policy.spec.high = a.at("high").get<std::vector<double>>();
    out.policy.policy = params_from_json(j.at("policy"));
    out.policy.value = params_from_json(j.at("value"));
    return out;
  } catch (const json::exception& e) {
    throw IoError(std::string("policy file: ") + e.what());
  }
}

void save_policy(const std::string& path, const rl::ActorCritic& policy,
                 const harness::TrainConfig& config) {
  write_file(path, policy_to_json(policy, config).dump(1) + "\n");
}

SavedPolicy load_policy(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  return policy_from_json(j);
}

}  // namespace pbppo::cli
