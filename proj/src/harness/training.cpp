#include "pbppo/harness/training.hpp"

#include <chrono>

#include "pbppo/envs/pointnav.hpp"
#include "pbppo/envs/registry.hpp"
#include "pbppo/error.hpp"
#include "pbppo/nn/kernels.hpp"
#include "pbppo/rl/rollout.hpp"

namespace pbppo::harness {

EvalResult evaluate_policy(const rl::ActorCritic& policy, envs::Env& env, int k, Rng& rng) {
  if (k < 1) throw ConfigError("eval-episodes: must be >= 1");
  EvalResult out;
  for (int e = 0; e < k; ++e) {
    auto obs = env.reset(rng.next_u64());
    double ret = 0.0;
    for (;;) {
      const auto action = policy.act_deterministic(obs);
      auto r = env.step(action);
      ret += r.reward;
      if (r.done) break;
      obs = std::move(r.observation);
    }
    out.returns.push_back(ret);
  }
  double s = 0.0;
  for (double r : out.returns) s += r;
  out.mean_return = s / static_cast<double>(k);
  return out;
}

std::vector<std::pair<double, double>> trace_episode(const rl::ActorCritic& policy,
                                                     envs::Env& env, std::uint64_t seed) {
  std::vector<std::pair<double, double>> rows;
  auto* nav = dynamic_cast<envs::PointNav*>(&env);
  if (nav == nullptr) return rows;
  auto obs = env.reset(seed);
  rows.emplace_back(nav->state().x, nav->state().y);
  for (;;) {
    auto r = env.step(policy.act_deterministic(obs));
    rows.emplace_back(nav->state().x, nav->state().y);
    if (r.done) break;
    obs = std::move(r.observation);
  }
  return rows;
}

rl::PpoHyper resolve_ppo_hyper(const TrainConfig& config, const envs::ActionSpec& spec) {
  rl::PpoHyper h = config.ppo;
  h.entropy_coef = config.entropy_coef.value_or(spec.discrete ? 0.01 : 0.0);
  h.allow_zero_epsilon = config.uses_bandit() && config.bandit.allow_zero_bound;
  h.clip_epsilon = config.uses_bandit() ? config.bandit.bounds_min : config.fixed_epsilon;
  return h;
}

RunArtifacts run_training(const TrainConfig& config, const IterationCallback& on_iteration) {
  config.validate();
  RunArtifacts art;
  art.config = config;

  Rng master(config.seed);
  Rng init_rng = master.split();
  Rng train_rng = master.split();
  Rng eval_rng = master.split();

  rl::EnvCursor cursor(envs::make_env(config.env, config.layout_path));
  auto eval_env = cursor.env().clone();
  const auto spec = cursor.env().action_spec();

  rl::NetworkConfig net;
  net.hidden = config.hidden;
  net.init_log_std = config.init_log_std;
  art.policy = rl::ActorCritic(cursor.env().observation_dim(), spec, net, init_rng);

  rl::PpoHyper hyper = resolve_ppo_hyper(config, spec);
  if (!art.config.entropy_coef) art.config.entropy_coef = hyper.entropy_coef;
  nn::AdamConfig adam;
  adam.learning_rate = hyper.learning_rate;
  rl::OptimizerStates opt = rl::make_optimizers(art.policy, adam);
  const nn::Exec exec = config.parallel_kernels && nn::parallel_kernels_available()
                            ? nn::Exec::kParallel
                            : nn::Exec::kSerial;

  bandit::SelectOptions select;
  if (config.uses_bandit()) {
    const auto& b = config.bandit;
    art.bandit = bandit::BanditState(
        bandit::generate_bounds(b.bounds_min, b.bounds_max, b.bounds_n), b.gamma,
        b.allow_zero_bound, b.rule);
    select.lambda = b.lambda;
    select.mode = b.mode;
    select.normalization = config.algorithm == Algorithm::kPbPpoWiAd
                               ? bandit::Normalization::kWithAdvantage
                               : bandit::Normalization::kWithoutAdvantage;
    select.sigma = b.sigma.value_or(0.0);
  }

  std::uint64_t env_steps = 0;
  std::size_t iteration = 0;
  try {
    while (env_steps < config.total_steps) {
      const auto t0 = std::chrono::steady_clock::now();
      IterationRecord rec;
      rec.iteration = iteration;

      rl::Trajectory traj = rl::collect(art.policy, cursor, train_rng, config.horizon);
      env_steps += traj.length();
      rec.env_steps = env_steps;

      // pi_old is implicit: the stored logprobs were produced by the acting
      // policy before any update of this iteration.
      double eps = config.fixed_epsilon;
      if (art.bandit) {
        BanditSnapshot snap;
        snap.expectations = art.bandit->expectations;
        snap.visits = art.bandit->arm_visits;
        snap.ucb = bandit::select_arm(*art.bandit, select);
        rec.arm = snap.ucb.selected;
        eps = art.bandit->bounds[*rec.arm];
        rec.bandit = std::move(snap);
      }
      rec.epsilon = eps;
      hyper.clip_epsilon = eps;

      const auto adv = rl::normalize_advantages(
          rl::compute_gae(traj, config.gamma, config.gae_lambda));
      const auto stats = rl::ppo_update(art.policy, traj, adv, hyper, opt, train_rng, exec);
      rec.policy_loss = stats.policy_loss;
      rec.value_loss = stats.value_loss;
      rec.entropy = stats.entropy;
      rec.clip_fraction = stats.clip_fraction;
      rec.mean_ratio = stats.mean_ratio;
      rec.update_aborted = stats.aborted;

      const EvalResult ev =
          evaluate_policy(art.policy, *eval_env, config.eval_episodes, eval_rng);
      rec.eval_return_mean = ev.mean_return;
      rec.eval_returns = ev.returns;

      if (art.bandit) bandit::record_feedback(*art.bandit, *rec.arm, ev.mean_return);

      rec.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      art.records.push_back(std::move(rec));
      if (on_iteration) on_iteration(art.records.back());
      ++iteration;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    art.failed = true;
    art.failure = e.what();
    art.failure_category = e.category();
  }
  return art;
}

std::optional<double> success_rate(const std::vector<double>& returns) {
  if (returns.size() < 2) return std::nullopt;
  std::size_t wins = 0;
  for (std::size_t i = 1; i < returns.size(); ++i) {
    if (returns[i] > returns[i - 1]) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(returns.size() - 1);
}

std::optional<double> success_rate(const std::vector<IterationRecord>& records) {
  std::vector<double> r;
  r.reserve(records.size());
  for (const auto& rec : records) r.push_back(rec.eval_return_mean);
  return success_rate(r);
}

}  // namespace pbppo::harness
