#ifndef PBPPO_HARNESS_CONFIG_HPP_
#define PBPPO_HARNESS_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "pbppo/bandit/bandit.hpp"
#include "pbppo/rl/actor_critic.hpp"
#include "pbppo/rl/ppo.hpp"

namespace pbppo::harness {

enum class Algorithm { kPpoFixed, kPbPpoWiAd, kPbPpoWoAd };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);
std::string to_string(bandit::UncertaintyMode m);
bandit::UncertaintyMode parse_uncertainty_mode(const std::string& s);
std::string to_string(bandit::ExpectationRule r);
bandit::ExpectationRule parse_expectation_rule(const std::string& s);

struct BanditSettings {
  double bounds_min = 0.05;
  double bounds_max = 0.5;
  int bounds_n = 10;
  double lambda = 5.0;
  double gamma = 0.9;
  bandit::UncertaintyMode mode = bandit::UncertaintyMode::kVisitation;
  std::optional<double> sigma;  // Hoeffding mode only
  bandit::ExpectationRule rule = bandit::ExpectationRule::kRecency;
  bool allow_zero_bound = false;

  friend bool operator==(const BanditSettings&, const BanditSettings&) = default;
};

struct TrainConfig {
  std::string env = "gridnav";
  std::string layout_path;  // pointnav only; empty = built-in
  Algorithm algorithm = Algorithm::kPbPpoWiAd;
  double fixed_epsilon = 0.2;  // ppo-fixed only
  BanditSettings bandit;       // pb-ppo only
  rl::PpoHyper ppo;
  // Unset: 0.01 for discrete action spaces, 0 for continuous.
  std::optional<double> entropy_coef;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  std::size_t horizon = 2048;
  int eval_episodes = 2;
  std::uint64_t total_steps = 200000;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::vector<std::size_t> hidden = {64, 64};
  double init_log_std = 0.0;
  bool parallel_kernels = true;
  bool record_wall_clock = false;

  bool uses_bandit() const { return algorithm != Algorithm::kPpoFixed; }
  // Throws ConfigError naming the key and the violated constraint.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace pbppo::harness

#endif  // PBPPO_HARNESS_CONFIG_HPP_
