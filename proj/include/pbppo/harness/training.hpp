#ifndef PBPPO_HARNESS_TRAINING_HPP_
#define PBPPO_HARNESS_TRAINING_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbppo/bandit/bandit.hpp"
#include "pbppo/envs/env.hpp"
#include "pbppo/error.hpp"
#include "pbppo/harness/config.hpp"
#include "pbppo/rl/actor_critic.hpp"
#include "pbppo/rl/ppo.hpp"
#include "pbppo/rng.hpp"

namespace pbppo::harness {

struct EvalResult {
  double mean_return = 0.0;
  std::vector<double> returns;
};

// Runs k complete episodes with the deterministic policy on env, seeding
// each reset from rng. Only env and rng are touched.
EvalResult evaluate_policy(const rl::ActorCritic& policy, envs::Env& env, int k, Rng& rng);

// One (x, y) row per step of a single deterministic episode, for pointnav
// trajectory dumps. Non-pointnav environments yield no rows.
std::vector<std::pair<double, double>> trace_episode(const rl::ActorCritic& policy,
                                                     envs::Env& env, std::uint64_t seed);

struct BanditSnapshot {
  std::vector<double> expectations;
  std::vector<std::uint64_t> visits;
  bandit::UcbReport ucb;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::uint64_t env_steps = 0;
  double epsilon = 0.0;
  std::optional<std::size_t> arm;
  // Bandit state the selection saw (pre-feedback) and the resulting scores.
  std::optional<BanditSnapshot> bandit;
  double eval_return_mean = 0.0;
  std::vector<double> eval_returns;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double mean_ratio = 0.0;
  bool update_aborted = false;
  double wall_ms = 0.0;
};

struct RunArtifacts {
  TrainConfig config;  // as resolved for the run
  rl::ActorCritic policy;
  std::vector<IterationRecord> records;
  std::optional<bandit::BanditState> bandit;
  bool failed = false;
  std::string failure;
  ErrorCategory failure_category = ErrorCategory::kNumerical;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

// Resolves entropy_coef, clip settings and kernel execution from config.
rl::PpoHyper resolve_ppo_hyper(const TrainConfig& config, const envs::ActionSpec& spec);

// Collect, snapshot, select epsilon, update, evaluate, feed back; repeated
// until the training step budget is spent. on_iteration fires after each
// record is appended. Environment and numerical failures end the run with
// failed = true and the records gathered so far.
RunArtifacts run_training(const TrainConfig& config,
                          const IterationCallback& on_iteration = {});

// Fraction of consecutive record pairs whose evaluated return strictly
// increased; empty for fewer than two records.
std::optional<double> success_rate(const std::vector<IterationRecord>& records);
std::optional<double> success_rate(const std::vector<double>& returns);

}  // namespace pbppo::harness

#endif  // PBPPO_HARNESS_TRAINING_HPP_
