#ifndef PBPPO_RL_PPO_HPP_
#define PBPPO_RL_PPO_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pbppo/nn/adam.hpp"
#include "pbppo/nn/tape.hpp"
#include "pbppo/rl/actor_critic.hpp"
#include "pbppo/rl/rollout.hpp"
#include "pbppo/rng.hpp"

namespace pbppo::rl {

struct PpoHyper {
  double clip_epsilon = 0.2;
  int update_epochs = 10;
  std::size_t minibatch_size = 64;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;
  double learning_rate = 3e-4;
  // Permits clip_epsilon == 0 (bandit grids may include it).
  bool allow_zero_epsilon = false;

  // Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const PpoHyper&, const PpoHyper&) = default;
};

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
double clip_objective(double ratio, double advantage, double eps);
// Element-wise tape form; ratio and advantage have the same shape.
nn::Var clip_objective(nn::Tape& tape, nn::Var ratio, nn::Var advantage, double eps);

// Mean squared error.
double value_loss(std::span<const double> predictions, std::span<const double> targets);

struct UpdateStats {
  double policy_loss = 0.0;  // mean over minibatches of -(clip objective mean)
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;  // |ratio - 1| > eps over every evaluated sample
  std::size_t minibatches = 0;
  std::vector<double> ratios;  // every ratio evaluated, in evaluation order
  bool aborted = false;
  std::string failure;
};

struct OptimizerStates {
  nn::AdamState policy;
  nn::AdamState value;

  friend bool operator==(const OptimizerStates&, const OptimizerStates&) = default;
};

OptimizerStates make_optimizers(const ActorCritic& ac, const nn::AdamConfig& config);

// A subset of the collected batch in tape-ready form.
struct Minibatch {
  nn::Matrix observations;
  nn::Matrix actions;  // continuous only
  std::vector<std::size_t> discrete_actions;
  nn::Matrix old_logprobs;  // rows x 1
  nn::Matrix advantages;    // rows x 1
  nn::Matrix returns;       // rows x 1
};

Minibatch gather_minibatch(const ActorCritic& ac, const Trajectory& traj,
                           const AdvantageBatch& adv, std::span<const std::size_t> idx);

struct PpoLossNodes {
  nn::Var total;
  nn::Var policy_loss;
  nn::Var value_loss;
  nn::Var entropy;
  nn::Var ratio;
};

// Records -(mean clip objective) + value_coef * MSE - entropy_coef * entropy.
PpoLossNodes build_ppo_loss(nn::Tape& tape, std::size_t policy_handle,
                            std::size_t value_handle, const ActorCritic& ac,
                            const Minibatch& mb, double clip_epsilon,
                            const PpoHyper& hyper);

struct PpoGradients {
  double loss = 0.0;
  nn::ParameterSet policy;
  nn::ParameterSet value;
  std::vector<double> ratios;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

PpoGradients ppo_loss_grad(const ActorCritic& ac, const Minibatch& mb,
                           const PpoHyper& hyper, nn::Exec exec = nn::Exec::kSerial);

// Scales both gradient sets by max_norm / (norm + 1e-6) when their joint L2
// norm exceeds max_norm. Returns the norm before clipping.
double clip_grad_norm(nn::ParameterSet& a, nn::ParameterSet& b, double max_norm);

// Epochs of shuffled minibatch descent on the PPO loss. A numerical failure
// restores the networks and optimizer states to their pre-update values and
// reports the failure in the returned stats.
UpdateStats ppo_update(ActorCritic& ac, const Trajectory& traj, const AdvantageBatch& adv,
                       const PpoHyper& hyper, OptimizerStates& opt, Rng& rng,
                       nn::Exec exec = nn::Exec::kSerial);

}  // namespace pbppo::rl

#endif  // PBPPO_RL_PPO_HPP_
