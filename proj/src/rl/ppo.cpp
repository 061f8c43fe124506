#include "pbppo/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pbppo/error.hpp"
#include "pbppo/nn/distributions.hpp"
#include "pbppo/nn/mlp.hpp"

namespace pbppo::rl {

void PpoHyper::validate() const {
  const bool eps_ok = allow_zero_epsilon ? (clip_epsilon >= 0.0 && clip_epsilon < 1.0)
                                         : (clip_epsilon > 0.0 && clip_epsilon < 1.0);
  if (!eps_ok) {
    throw ConfigError(allow_zero_epsilon ? "clip_epsilon must lie in [0, 1)"
                                         : "clip_epsilon must lie in (0, 1)");
  }
  if (update_epochs < 1) throw ConfigError("update_epochs must be >= 1");
  if (minibatch_size < 1) throw ConfigError("minibatch_size must be >= 1");
  if (!(value_coef >= 0.0)) throw ConfigError("value_coef must be >= 0");
  if (!(entropy_coef >= 0.0)) throw ConfigError("entropy_coef must be >= 0");
  if (!(max_grad_norm > 0.0)) throw ConfigError("max_grad_norm must be > 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
}

double clip_objective(double ratio, double advantage, double eps) {
  const double clipped = std::min(std::max(ratio, 1.0 - eps), 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

nn::Var clip_objective(nn::Tape& tape, nn::Var ratio, nn::Var advantage, double eps) {
  const nn::Var unclipped = tape.mul(ratio, advantage);
  const nn::Var clipped = tape.mul(tape.clip(ratio, 1.0 - eps, 1.0 + eps), advantage);
  return tape.minimum(unclipped, clipped);
}

double value_loss(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.empty() || predictions.size() != targets.size()) {
    throw ConfigError("value_loss: need equal, non-empty inputs");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    s += d * d;
  }
  return s / static_cast<double>(predictions.size());
}

OptimizerStates make_optimizers(const ActorCritic& ac, const nn::AdamConfig& config) {
  return {nn::AdamState(ac.policy, config), nn::AdamState(ac.value, config)};
}

Minibatch gather_minibatch(const ActorCritic& ac, const Trajectory& traj,
                           const AdvantageBatch& adv, std::span<const std::size_t> idx) {
  const std::size_t rows = idx.size();
  const std::size_t obs_dim = ac.obs_dim();
  Minibatch mb;
  mb.observations = nn::Matrix(rows, obs_dim);
  mb.old_logprobs = nn::Matrix(rows, 1);
  mb.advantages = nn::Matrix(rows, 1);
  mb.returns = nn::Matrix(rows, 1);
  if (ac.discrete()) {
    mb.discrete_actions.resize(rows);
  } else {
    mb.actions = nn::Matrix(rows, ac.spec.dim());
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = idx[r];
    std::copy(traj.observations[i].begin(), traj.observations[i].end(),
              mb.observations.row_span(r).begin());
    if (ac.discrete()) {
      mb.discrete_actions[r] = static_cast<std::size_t>(traj.actions[i][0]);
    } else {
      std::copy(traj.actions[i].begin(), traj.actions[i].end(),
                mb.actions.row_span(r).begin());
    }
    mb.old_logprobs.data[r] = traj.logprobs[i];
    mb.advantages.data[r] = adv.advantages[i];
    mb.returns.data[r] = adv.returns_to_go[i];
  }
  return mb;
}

PpoLossNodes build_ppo_loss(nn::Tape& tape, std::size_t policy_handle,
                            std::size_t value_handle, const ActorCritic& ac,
                            const Minibatch& mb, double clip_epsilon,
                            const PpoHyper& hyper) {
  const std::size_t rows = mb.observations.rows;
  const nn::Var obs = tape.input(mb.observations);
  const nn::Var out = nn::mlp_forward(tape, obs, policy_handle, ac.policy);

  nn::Var logp;
  nn::Var entropy_rows;
  if (ac.discrete()) {
    logp = nn::categorical_logprob(tape, out, mb.discrete_actions);
    entropy_rows = nn::categorical_entropy(tape, out);
  } else {
    const nn::Var log_std = tape.extra_row(policy_handle);
    logp = nn::gaussian_logprob(tape, out, log_std, tape.input(mb.actions));
    entropy_rows = nn::gaussian_entropy(tape, log_std, rows);
  }

  PpoLossNodes n;
  n.ratio = tape.exp(tape.sub(logp, tape.input(mb.old_logprobs)));
  const nn::Var adv = tape.input(mb.advantages);
  n.policy_loss = tape.neg(tape.mean(clip_objective(tape, n.ratio, adv, clip_epsilon)));

  const nn::Var v = nn::mlp_forward(tape, obs, value_handle, ac.value);
  n.value_loss = tape.mean(tape.square(tape.sub(v, tape.input(mb.returns))));
  n.entropy = tape.mean(entropy_rows);

  n.total = tape.add(n.policy_loss, tape.scale(n.value_loss, hyper.value_coef));
  if (hyper.entropy_coef != 0.0) {
    n.total = tape.sub(n.total, tape.scale(n.entropy, hyper.entropy_coef));
  }
  return n;
}

PpoGradients ppo_loss_grad(const ActorCritic& ac, const Minibatch& mb,
                           const PpoHyper& hyper, nn::Exec exec) {
  PpoGradients g;
  g.policy = ac.policy.zeros_like();
  g.value = ac.value.zeros_like();
  nn::Tape tape(exec);
  const std::size_t hp = tape.bind(ac.policy, g.policy);
  const std::size_t hv = tape.bind(ac.value, g.value);
  const PpoLossNodes n = build_ppo_loss(tape, hp, hv, ac, mb, hyper.clip_epsilon, hyper);
  tape.backward(n.total);
  g.loss = tape.scalar(n.total);
  g.policy_loss = tape.scalar(n.policy_loss);
  g.value_loss = tape.scalar(n.value_loss);
  g.entropy = tape.scalar(n.entropy);
  g.ratios = tape.value(n.ratio).data;
  return g;
}

double clip_grad_norm(nn::ParameterSet& a, nn::ParameterSet& b, double max_norm) {
  const double norm = std::sqrt(a.squared_norm() + b.squared_norm());
  const double coef = max_norm / (norm + 1e-6);
  if (coef < 1.0) {
    for (double& v : a.values()) v *= coef;
    for (double& v : b.values()) v *= coef;
  }
  return norm;
}

UpdateStats ppo_update(ActorCritic& ac, const Trajectory& traj, const AdvantageBatch& adv,
                       const PpoHyper& hyper, OptimizerStates& opt, Rng& rng,
                       nn::Exec exec) {
  hyper.validate();
  traj.validate();
  const std::size_t n = traj.length();
  if (adv.advantages.size() != n || adv.returns_to_go.size() != n) {
    throw ConfigError("ppo_update: advantage batch does not match trajectory");
  }
  opt.policy.config.learning_rate = hyper.learning_rate;
  opt.value.config.learning_rate = hyper.learning_rate;

  const ActorCritic snapshot = ac;
  const OptimizerStates opt_snapshot = opt;

  UpdateStats stats;
  std::vector<std::size_t> order(n);
  std::size_t clipped = 0;
  double ratio_sum = 0.0;
  int epoch = 0;
  std::size_t batch_index = 0;
  try {
    for (epoch = 0; epoch < hyper.update_epochs; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng.engine());
      for (std::size_t start = 0; start < n; start += hyper.minibatch_size) {
        const std::size_t end = std::min(n, start + hyper.minibatch_size);
        const std::span<const std::size_t> idx(order.data() + start, end - start);
        const Minibatch mb = gather_minibatch(ac, traj, adv, idx);
        PpoGradients g = ppo_loss_grad(ac, mb, hyper, exec);

        for (double r : g.ratios) {
          if (std::abs(r - 1.0) > hyper.clip_epsilon) ++clipped;
          ratio_sum += r;
        }
        stats.ratios.insert(stats.ratios.end(), g.ratios.begin(), g.ratios.end());
        stats.policy_loss += g.policy_loss;
        stats.value_loss += g.value_loss;
        stats.entropy += g.entropy;
        ++stats.minibatches;

        clip_grad_norm(g.policy, g.value, hyper.max_grad_norm);
        nn::adam_step(opt.policy, ac.policy, g.policy);
        nn::adam_step(opt.value, ac.value, g.value);
        ac.clamp_log_std();
        if (!ac.policy.all_finite() || !ac.value.all_finite()) {
          throw NumericalError("adam_step", "non-finite parameters after update");
        }
        ++batch_index;
      }
    }
  } catch (const NumericalError& e) {
    ac = snapshot;
    opt = opt_snapshot;
    UpdateStats failed;
    failed.aborted = true;
    failed.failure = "numerical failure in epoch " + std::to_string(epoch) +
                     ", minibatch " + std::to_string(batch_index) + " (" +
                     e.primitive() + "): " + e.what();
    return failed;
  }

  const double mb = static_cast<double>(stats.minibatches);
  stats.policy_loss /= mb;
  stats.value_loss /= mb;
  stats.entropy /= mb;
  const double total = static_cast<double>(stats.ratios.size());
  stats.mean_ratio = ratio_sum / total;
  stats.clip_fraction = static_cast<double>(clipped) / total;
  return stats;
}

}  // namespace pbppo::rl
