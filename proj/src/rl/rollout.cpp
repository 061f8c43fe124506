#include "pbppo/rl/rollout.hpp"

#include <cmath>
#include <string>

#include "pbppo/error.hpp"

namespace pbppo::rl {

void Trajectory::validate() const {
  const std::size_t t = rewards.size();
  if (t == 0) throw ConfigError("trajectory: empty");
  if (observations.size() != t + 1 || values.size() != t + 1 || actions.size() != t ||
      logprobs.size() != t || dones.size() != t) {
    throw ConfigError("trajectory: inconsistent lengths");
  }
  for (std::size_t i = 0; i < t; ++i) {
    if (!std::isfinite(rewards[i]) || !std::isfinite(logprobs[i])) {
      throw ConfigError("trajectory: non-finite reward or logprob at " + std::to_string(i));
    }
  }
}

const std::vector<double>& EnvCursor::observation(Rng& rng) {
  if (needs_reset_) {
    obs_ = env_->reset(rng.next_u64());
    needs_reset_ = false;
    episode_return_ = 0.0;
  }
  return obs_;
}

envs::StepResult EnvCursor::step(std::span<const double> action, Rng& rng) {
  observation(rng);
  auto r = env_->step(action);
  episode_return_ += r.reward;
  if (r.done) {
    finished_returns_.push_back(episode_return_);
    needs_reset_ = true;
  } else {
    obs_ = r.observation;
  }
  return r;
}

std::vector<double> EnvCursor::take_finished_returns() {
  std::vector<double> out;
  out.swap(finished_returns_);
  return out;
}

Trajectory collect(const ActorCritic& policy, EnvCursor& cursor, Rng& rng,
                   std::size_t horizon) {
  if (horizon == 0) throw ConfigError("collect: horizon must be at least 1");
  Trajectory traj;
  traj.observations.reserve(horizon + 1);
  traj.actions.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::vector<double> obs = cursor.observation(rng);
    const ActSample sample = policy.act(obs, rng);
    envs::StepResult r;
    try {
      r = cursor.step(sample.action, rng);
    } catch (const std::exception& e) {
      throw EnvError("environment fault at step " + std::to_string(t) + ": " + e.what());
    }
    traj.observations.push_back(obs);
    traj.actions.push_back(sample.action);
    traj.logprobs.push_back(sample.logprob);
    traj.values.push_back(sample.value);
    traj.rewards.push_back(r.reward);
    traj.dones.push_back(r.done);
  }
  const std::vector<double>& last = cursor.observation(rng);
  traj.observations.push_back(last);
  traj.values.push_back(policy.predict_value(last));
  traj.completed_episode_returns = cursor.take_finished_returns();
  return traj;
}

AdvantageBatch compute_gae(const Trajectory& traj, double gamma, double lambda) {
  if (!(gamma >= 0.0 && gamma <= 1.0) || !(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("compute_gae: gamma and lambda must lie in [0, 1]");
  }
  traj.validate();
  const std::size_t n = traj.length();
  AdvantageBatch out;
  out.advantages.assign(n, 0.0);
  out.returns_to_go.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double live = traj.dones[i] ? 0.0 : 1.0;
    const double delta =
        traj.rewards[i] + gamma * traj.values[i + 1] * live - traj.values[i];
    next_adv = delta + gamma * lambda * live * next_adv;
    out.advantages[i] = next_adv;
    out.returns_to_go[i] = next_adv + traj.values[i];
  }
  return out;
}

AdvantageBatch normalize_advantages(AdvantageBatch batch) {
  auto& a = batch.advantages;
  if (a.empty()) throw ConfigError("normalize_advantages: empty batch");
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean);
  var /= static_cast<double>(a.size());
  const double std = std::sqrt(var);
  const bool degenerate = a.size() == 1 || std < 1e-8;
  for (double& v : a) v = degenerate ? v - mean : (v - mean) / (std + 1e-8);
  return batch;
}

}  // namespace pbppo::rl
