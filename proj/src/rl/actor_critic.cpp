#include "pbppo/rl/actor_critic.hpp"

#include <algorithm>

#include "pbppo/error.hpp"
#include "pbppo/nn/mlp.hpp"

namespace pbppo::rl {

ActorCritic::ActorCritic(std::size_t obs_dim, envs::ActionSpec action_spec,
                         const NetworkConfig& config, Rng& rng)
    : spec(std::move(action_spec)) {
  if (obs_dim == 0) throw ConfigError("actor-critic: observation dimension is zero");
  std::vector<std::size_t> sizes{obs_dim};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());

  auto policy_sizes = sizes;
  policy_sizes.push_back(spec.discrete ? spec.count : spec.dim());
  policy = nn::ParameterSet::mlp(policy_sizes, spec.discrete ? 0 : spec.dim());
  policy.init_scaled_normal(rng, config.hidden_gain, config.policy_output_gain);
  for (double& s : policy.extra()) s = config.init_log_std;
  clamp_log_std();

  auto value_sizes = sizes;
  value_sizes.push_back(1);
  value = nn::ParameterSet::mlp(value_sizes);
  value.init_scaled_normal(rng, config.hidden_gain, config.value_output_gain);
}

nn::GaussianHead ActorCritic::gaussian_head(std::span<const double> obs) const {
  nn::GaussianHead head;
  head.mean = nn::mlp_forward(policy, obs);
  head.log_std.assign(policy.extra().begin(), policy.extra().end());
  return head;
}

ActSample ActorCritic::act(std::span<const double> obs, Rng& rng) const {
  ActSample s;
  if (spec.discrete) {
    const auto logits = nn::mlp_forward(policy, obs);
    const auto draw = nn::categorical_logprob_and_sample(logits, rng);
    s.action = {static_cast<double>(draw.action)};
    s.logprob = draw.logprob;
  } else {
    const auto head = gaussian_head(obs);
    s.action = nn::gaussian_sample(head, rng);
    s.logprob = nn::gaussian_logprob(head, s.action);
  }
  s.value = predict_value(obs);
  return s;
}

std::vector<double> ActorCritic::act_deterministic(std::span<const double> obs) const {
  auto out = nn::mlp_forward(policy, obs);
  if (!spec.discrete) return out;
  const auto best = std::max_element(out.begin(), out.end()) - out.begin();
  return {static_cast<double>(best)};
}

double ActorCritic::predict_value(std::span<const double> obs) const {
  return nn::mlp_forward(value, obs)[0];
}

double ActorCritic::logprob(std::span<const double> obs,
                            std::span<const double> action) const {
  if (spec.discrete) {
    const auto lp = nn::log_softmax(nn::mlp_forward(policy, obs));
    return lp.at(static_cast<std::size_t>(action[0]));
  }
  return nn::gaussian_logprob(gaussian_head(obs), action);
}

void ActorCritic::clamp_log_std() {
  for (double& s : policy.extra()) s = std::clamp(s, nn::kLogStdMin, nn::kLogStdMax);
}

}  // namespace pbppo::rl
