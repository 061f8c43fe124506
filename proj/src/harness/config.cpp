#include "pbppo/harness/config.hpp"

#include <cmath>

#include "pbppo/envs/registry.hpp"
#include "pbppo/error.hpp"

namespace pbppo::harness {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kPpoFixed: return "ppo-fixed";
    case Algorithm::kPbPpoWiAd: return "pb-ppo-wi-ad";
    case Algorithm::kPbPpoWoAd: return "pb-ppo-wo-ad";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "ppo-fixed") return Algorithm::kPpoFixed;
  if (s == "pb-ppo-wi-ad") return Algorithm::kPbPpoWiAd;
  if (s == "pb-ppo-wo-ad") return Algorithm::kPbPpoWoAd;
  throw ConfigError("algo: '" + s + "' is not one of ppo-fixed, pb-ppo-wi-ad, pb-ppo-wo-ad");
}

std::string to_string(bandit::UncertaintyMode m) {
  return m == bandit::UncertaintyMode::kVisitation ? "visitation" : "hoeffding";
}

bandit::UncertaintyMode parse_uncertainty_mode(const std::string& s) {
  if (s == "visitation") return bandit::UncertaintyMode::kVisitation;
  if (s == "hoeffding") return bandit::UncertaintyMode::kHoeffding;
  throw ConfigError("bandit-mode: '" + s + "' is not one of visitation, hoeffding");
}

std::string to_string(bandit::ExpectationRule r) {
  return r == bandit::ExpectationRule::kRecency ? "recency" : "forward-discount";
}

bandit::ExpectationRule parse_expectation_rule(const std::string& s) {
  if (s == "recency") return bandit::ExpectationRule::kRecency;
  if (s == "forward-discount") return bandit::ExpectationRule::kForwardDiscount;
  throw ConfigError("bandit-rule: '" + s + "' is not one of recency, forward-discount");
}

namespace {
void require(bool ok, const std::string& key, const std::string& constraint) {
  if (!ok) throw ConfigError(key + ": " + constraint);
}
}  // namespace

void TrainConfig::validate() const {
  require(envs::is_known_env(env), "env",
          "must be one of gridnav, pendulum, pointnav-easy, pointnav-medium, pointnav-hard");
  require(layout_path.empty() || env.rfind("pointnav-", 0) == 0, "layout",
          "only applies to pointnav environments");
  require(fixed_epsilon > 0.0 && fixed_epsilon < 1.0, "clip", "epsilon must lie in (0,1)");
  if (algorithm != Algorithm::kPpoFixed) {
    const auto& b = bandit;
    require(b.bounds_n >= 1, "bounds-n", "must be >= 1");
    require(b.bounds_min >= 0.0 && b.bounds_max <= 1.0, "bounds-min/bounds-max",
            "must lie in [0,1]");
    require(b.bounds_min < b.bounds_max, "bounds-min", "must be < bounds-max");
    require(b.allow_zero_bound || b.bounds_min > 0.0, "bounds-min",
            "must be > 0 unless allow-zero-bound is set");
    require(b.lambda >= 0.0, "lambda", "must be >= 0");
    require(b.gamma >= 0.0 && b.gamma <= 1.0, "bandit-gamma", "must lie in [0,1]");
    if (b.mode == bandit::UncertaintyMode::kHoeffding) {
      require(b.sigma.has_value(), "sigma", "is required in hoeffding mode");
    }
    if (b.sigma) require(*b.sigma > 0.0 && *b.sigma < 1.0, "sigma", "must lie in (0,1)");
  }
  require(ppo.update_epochs >= 1, "epochs", "must be >= 1");
  require(ppo.minibatch_size >= 1, "minibatch", "must be >= 1");
  require(ppo.value_coef >= 0.0, "value-coef", "must be >= 0");
  require(ppo.max_grad_norm > 0.0, "max-grad-norm", "must be > 0");
  require(ppo.learning_rate > 0.0 && std::isfinite(ppo.learning_rate), "lr", "must be > 0");
  if (entropy_coef) require(*entropy_coef >= 0.0, "entropy-coef", "must be >= 0");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma", "must lie in [0,1]");
  require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "gae-lambda", "must lie in [0,1]");
  require(horizon >= 1, "horizon", "must be >= 1");
  require(eval_episodes >= 1, "eval-episodes", "must be >= 1");
  require(total_steps >= horizon, "steps", "must be >= horizon");
  require(!hidden.empty(), "hidden", "needs at least one hidden layer");
  for (auto h : hidden) require(h >= 1, "hidden", "layer sizes must be >= 1");
  require(init_log_std >= -20.0 && init_log_std <= 2.0, "init-log-std", "must lie in [-20,2]");
}

}  // namespace pbppo::harness
