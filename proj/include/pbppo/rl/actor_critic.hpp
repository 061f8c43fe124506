#ifndef PBPPO_RL_ACTOR_CRITIC_HPP_
#define PBPPO_RL_ACTOR_CRITIC_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "pbppo/envs/env.hpp"
#include "pbppo/nn/distributions.hpp"
#include "pbppo/nn/parameters.hpp"
#include "pbppo/rng.hpp"

namespace pbppo::rl {

struct NetworkConfig {
  std::vector<std::size_t> hidden = {64, 64};
  double init_log_std = 0.0;
  double hidden_gain = 1.0;
  double policy_output_gain = 0.01;
  double value_output_gain = 1.0;
};

struct ActSample {
  std::vector<double> action;  // discrete: one element holding the index
  double logprob = 0.0;
  double value = 0.0;
};

// Policy network pi(a|s) and value network V(s). Continuous policies carry a
// state-independent log-std in the policy's extra block; discrete policies
// output logits.
class ActorCritic {
 public:
  ActorCritic() = default;
  ActorCritic(std::size_t obs_dim, envs::ActionSpec spec, const NetworkConfig& config,
              Rng& rng);

  ActSample act(std::span<const double> obs, Rng& rng) const;
  // Gaussian mean or argmax of logits (lowest index on ties).
  std::vector<double> act_deterministic(std::span<const double> obs) const;
  double predict_value(std::span<const double> obs) const;
  nn::GaussianHead gaussian_head(std::span<const double> obs) const;
  double logprob(std::span<const double> obs, std::span<const double> action) const;

  // Enforces the log-std range after an optimizer step.
  void clamp_log_std();

  bool discrete() const { return spec.discrete; }
  std::size_t obs_dim() const { return policy.input_dim(); }

  envs::ActionSpec spec;
  nn::ParameterSet policy;
  nn::ParameterSet value;

  friend bool operator==(const ActorCritic& a, const ActorCritic& b) {
    return a.policy == b.policy && a.value == b.value;
  }
};

}  // namespace pbppo::rl

#endif  // PBPPO_RL_ACTOR_CRITIC_HPP_
