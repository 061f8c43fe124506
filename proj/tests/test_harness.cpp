#include <doctest.h>

#include <algorithm>
#include <tuple>

#include "pbppo/envs/gridnav.hpp"
#include "pbppo/envs/pendulum.hpp"
#include "pbppo/error.hpp"
#include "pbppo/harness/training.hpp"
#include "test_support.hpp"

using namespace pbppo;
using namespace pbppo::harness;

namespace {

auto record_key(const IterationRecord& r) {
  return std::make_tuple(r.iteration, r.env_steps, r.epsilon, r.eval_returns, r.policy_loss,
                         r.value_loss, r.entropy, r.clip_fraction, r.mean_ratio,
                         r.update_aborted);
}

std::vector<decltype(record_key(IterationRecord{}))> keys(const RunArtifacts& art) {
  std::vector<decltype(record_key(IterationRecord{}))> out;
  for (const auto& r : art.records) out.push_back(record_key(r));
  return out;
}

// Linear policy on the scaled (x, y) observation: prefers up while below the
// goal row and right while left of the goal column, never down or left.
rl::ActorCritic up_right_policy() {
  Rng rng(0);
  rl::NetworkConfig net;
  net.hidden = {};
  rl::ActorCritic ac(2, envs::ActionSpec::discrete_actions(4), net, rng);
  ac.policy.fill(0.0);
  auto w = ac.policy.weights(0);  // 4 x 2, row = action
  auto b = ac.policy.bias(0);
  w[0 * 2 + 1] = -1.0;  // up:    -y
  w[3 * 2 + 0] = -1.0;  // right: -x
  b[1] = -5.0;
  b[2] = -5.0;
  return ac;
}

}  // namespace

TEST_CASE("run_training: budget equal to the horizon gives one record") {
  auto c = testing::quick_config();
  c.total_steps = c.horizon;
  const auto art = run_training(c);
  REQUIRE(art.records.size() == 1);
  CHECK(art.records[0].env_steps == c.horizon);
  CHECK_FALSE(art.failed);
}

TEST_CASE("run_training: env_steps grow by the horizon and never count evaluation") {
  auto c = testing::quick_config();
  c.total_steps = 1000;
  c.eval_episodes = 3;
  const auto art = run_training(c);
  REQUIRE(art.records.size() == 4);
  for (std::size_t i = 0; i < art.records.size(); ++i) {
    CHECK(art.records[i].iteration == i);
    CHECK(art.records[i].env_steps == (i + 1) * c.horizon);
    CHECK(art.records[i].eval_returns.size() == 3);
  }
}

TEST_CASE("run_training is deterministic for a fixed seed") {
  for (auto algo : {Algorithm::kPpoFixed, Algorithm::kPbPpoWiAd, Algorithm::kPbPpoWoAd}) {
    auto c = testing::quick_config();
    c.algorithm = algo;
    const auto a = run_training(c);
    const auto b = run_training(c);
    CHECK(keys(a) == keys(b));
    CHECK(a.policy == b.policy);
    CHECK(a.bandit == b.bandit);
  }
  auto c = testing::quick_config();
  const auto a = run_training(c);
  c.seed = 1;
  CHECK_FALSE(keys(a) == keys(run_training(c)));
}

TEST_CASE("run_training: a single-arm bandit behaves exactly like fixed clipping") {
  auto c = testing::quick_config();
  c.env = "pendulum";
  c.algorithm = Algorithm::kPbPpoWiAd;
  c.bandit.bounds_n = 1;
  c.bandit.bounds_min = 0.13;
  c.bandit.bounds_max = 0.3;
  const auto pb = run_training(c);
  c.algorithm = Algorithm::kPpoFixed;
  c.fixed_epsilon = 0.13;
  const auto fixed = run_training(c);
  CHECK(keys(pb) == keys(fixed));
  CHECK(pb.policy == fixed.policy);
}

TEST_CASE("run_training: epsilon is the argmax of the logged UCB values") {
  for (auto algo : {Algorithm::kPbPpoWiAd, Algorithm::kPbPpoWoAd}) {
    auto c = testing::quick_config();
    c.algorithm = algo;
    c.total_steps = 256 * 8;
    c.horizon = 256;
    c.bandit.lambda = 0.5;
    const auto art = run_training(c);
    REQUIRE(art.bandit.has_value());
    std::vector<std::uint64_t> visits(art.bandit->arms(), 0);
    for (const auto& r : art.records) {
      REQUIRE(r.bandit.has_value());
      const auto& comb = r.bandit->ucb.combined;
      const auto best =
          static_cast<std::size_t>(std::max_element(comb.begin(), comb.end()) - comb.begin());
      CHECK(r.arm == best);
      CHECK(r.epsilon == art.bandit->bounds[best]);
      // The snapshot equals the counts accumulated from earlier records.
      CHECK(r.bandit->visits == visits);
      ++visits[*r.arm];
    }
    CHECK(visits == art.bandit->arm_visits);
    std::uint64_t total = 0;
    for (auto v : visits) total += v;
    CHECK(total == art.bandit->total_visits);
  }
}

TEST_CASE("evaluate_policy leaves the policy untouched and depends only on its rng") {
  Rng rng(3);
  rl::NetworkConfig net;
  net.hidden = {8};
  const rl::ActorCritic ac(3, envs::ActionSpec::box({-2.0}, {2.0}), net, rng);
  const auto copy = ac;
  envs::Pendulum env;
  Rng eval_a(9), eval_b(9);
  const auto a = evaluate_policy(ac, env, 3, eval_a);
  const auto b = evaluate_policy(ac, env, 3, eval_b);
  CHECK(ac == copy);
  CHECK(a.returns == b.returns);
  CHECK(eval_a == eval_b);
  CHECK(a.returns.size() == 3);
  CHECK(a.mean_return == doctest::Approx((a.returns[0] + a.returns[1] + a.returns[2]) / 3.0));

  Rng one(4);
  const auto single = evaluate_policy(ac, env, 1, one);
  CHECK(single.mean_return == single.returns[0]);
  CHECK_THROWS_AS(evaluate_policy(ac, env, 0, one), ConfigError);
}

TEST_CASE("evaluate_policy: an up/right policy on gridnav earns the BFS optimum") {
  const auto ac = up_right_policy();
  envs::GridNav env;
  Rng rng(1);
  const auto ev = evaluate_policy(ac, env, 4, rng);
  for (double r : ev.returns) CHECK(r == ev.returns[0]);
  CHECK(ev.mean_return == doctest::Approx(*env.optimal_return()).epsilon(1e-12));
}

TEST_CASE("success_rate examples") {
  CHECK(*success_rate(std::vector<double>{1, 2, 1, 3}) == doctest::Approx(2.0 / 3.0));
  CHECK(*success_rate(std::vector<double>{1, 2, 3, 4, 5}) == 1.0);
  CHECK(*success_rate(std::vector<double>{2, 2, 2}) == 0.0);
  CHECK_FALSE(success_rate(std::vector<double>{7}).has_value());
  CHECK_FALSE(success_rate(std::vector<double>{}).has_value());
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> r(2 + rng.below(30));
    for (double& v : r) v = rng.normal();
    const double s = *success_rate(r);
    REQUIRE(s >= 0.0);
    REQUIRE(s <= 1.0);
  }
}

TEST_CASE("run_training: a failure ends the run with partial records") {
  auto c = testing::quick_config();
  c.total_steps = 256 * 5;
  const auto art = run_training(c, [](const IterationRecord& r) {
    if (r.iteration == 1) throw EnvError("simulated fault");
  });
  CHECK(art.failed);
  CHECK(art.failure_category == ErrorCategory::kEnvironment);
  CHECK(art.failure.find("simulated fault") != std::string::npos);
  CHECK(art.records.size() == 2);
}

TEST_CASE("run_training rejects invalid configurations up front") {
  auto c = testing::quick_config();
  c.horizon = 0;
  CHECK_THROWS_AS(run_training(c), ConfigError);
  c = testing::quick_config();
  c.bandit.bounds_min = 0.6;
  CHECK_THROWS_AS(run_training(c), ConfigError);
  c = testing::quick_config();
  c.env = "atari";
  CHECK_THROWS_AS(run_training(c), ConfigError);
  c = testing::quick_config();
  c.bandit.mode = bandit::UncertaintyMode::kHoeffding;
  CHECK_THROWS_AS(run_training(c), ConfigError);
  c.bandit.sigma = 0.5;
  CHECK_NOTHROW(run_training(c));
}

TEST_CASE("resolve_ppo_hyper picks entropy defaults by action type") {
  TrainConfig c;
  CHECK(resolve_ppo_hyper(c, envs::ActionSpec::discrete_actions(4)).entropy_coef == 0.01);
  CHECK(resolve_ppo_hyper(c, envs::ActionSpec::box({-1.0}, {1.0})).entropy_coef == 0.0);
  c.entropy_coef = 0.2;
  CHECK(resolve_ppo_hyper(c, envs::ActionSpec::box({-1.0}, {1.0})).entropy_coef == 0.2);
}
