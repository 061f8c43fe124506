#ifndef PBPPO_RL_ROLLOUT_HPP_
#define PBPPO_RL_ROLLOUT_HPP_

#include <cstddef>
#include <memory>
#include <vector>

#include "pbppo/envs/env.hpp"
#include "pbppo/rl/actor_critic.hpp"
#include "pbppo/rng.hpp"

namespace pbppo::rl {

// T transitions: observations and values hold T + 1 entries (the last is the
// bootstrap state); the rest hold T. Transitions may cross episode
// boundaries, marked by dones. After a done, the next observation is the
// reset observation of the following episode.
struct Trajectory {
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<double>> actions;
  std::vector<double> logprobs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<bool> dones;
  std::vector<double> completed_episode_returns;

  std::size_t length() const { return rewards.size(); }
  // Throws ConfigError when lengths are inconsistent or values non-finite.
  void validate() const;
};

struct AdvantageBatch {
  std::vector<double> advantages;
  std::vector<double> returns_to_go;
};

// Owns an environment and the position of the current episode so collection
// can resume across calls.
class EnvCursor {
 public:
  explicit EnvCursor(std::unique_ptr<envs::Env> env) : env_(std::move(env)) {}

  envs::Env& env() { return *env_; }
  const envs::Env& env() const { return *env_; }

  // Current observation, resetting with a seed drawn from rng if needed.
  const std::vector<double>& observation(Rng& rng);
  envs::StepResult step(std::span<const double> action, Rng& rng);
  // Returns of episodes completed since the last call.
  std::vector<double> take_finished_returns();

 private:
  std::unique_ptr<envs::Env> env_;
  std::vector<double> obs_;
  bool needs_reset_ = true;
  double episode_return_ = 0.0;
  std::vector<double> finished_returns_;
};

// Runs the acting policy for exactly horizon steps. Logprobs are those of the
// sampled actions under the acting policy. Environment failures are rethrown
// as EnvError naming the step index.
Trajectory collect(const ActorCritic& policy, EnvCursor& cursor, Rng& rng,
                   std::size_t horizon);

// delta_t = r_t + gamma V(s_{t+1}) (1 - done_t) - V(s_t)
// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1};  returns = A_t + V(s_t)
AdvantageBatch compute_gae(const Trajectory& traj, double gamma, double lambda);

// (A - mean) / (std + 1e-8) with population std. For T = 1 or std < 1e-8
// only the mean is removed.
AdvantageBatch normalize_advantages(AdvantageBatch batch);

}  // namespace pbppo::rl

#endif  // PBPPO_RL_ROLLOUT_HPP_
