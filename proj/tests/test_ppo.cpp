#include <doctest.h>

#include <cmath>

#include "pbppo/envs/gridnav.hpp"
#include "pbppo/envs/pendulum.hpp"
#include "pbppo/error.hpp"
#include "pbppo/nn/distributions.hpp"
#include "pbppo/nn/mlp.hpp"
#include "pbppo/rl/ppo.hpp"
#include "test_support.hpp"

using namespace pbppo;
using namespace pbppo::rl;

namespace {

// d/d ratio of sum_i clip_objective(ratio_i, A_i, eps) via the tape.
std::vector<double> objective_gradient(const std::vector<double>& ratios,
                                       const std::vector<double>& advs, double eps) {
  const std::vector<std::size_t> sizes = {1, 1};
  auto p = nn::ParameterSet::mlp(sizes, ratios.size());
  std::copy(ratios.begin(), ratios.end(), p.extra().begin());
  const auto lg = nn::loss_grad(p, [&](nn::Tape& t, std::size_t h) {
    return t.sum(clip_objective(t, t.extra_row(h), t.input(nn::Matrix::row(advs)), eps));
  });
  return {lg.grad.extra().begin(), lg.grad.extra().end()};
}

struct Batch {
  ActorCritic ac;
  Trajectory traj;
  AdvantageBatch adv;
};

Batch pendulum_batch(std::uint64_t seed, std::size_t horizon) {
  Rng rng(seed);
  NetworkConfig net;
  net.hidden = {16, 16};
  Batch b;
  b.ac = ActorCritic(3, envs::ActionSpec::box({-2.0}, {2.0}), net, rng);
  EnvCursor cursor(std::make_unique<envs::Pendulum>());
  b.traj = collect(b.ac, cursor, rng, horizon);
  b.adv = normalize_advantages(compute_gae(b.traj, 0.99, 0.95));
  return b;
}

}  // namespace

TEST_CASE("clip_objective examples") {
  CHECK(clip_objective(1.0, 2.0, 0.2) == 2.0);
  CHECK(clip_objective(1.5, 2.0, 0.2) == doctest::Approx(2.4).epsilon(1e-15));
  CHECK(clip_objective(0.5, -1.0, 0.2) == doctest::Approx(-0.8).epsilon(1e-15));
}

TEST_CASE("clip_objective: tape and scalar forms agree") {
  Rng rng(2);
  std::vector<double> ratios, advs;
  for (int i = 0; i < 200; ++i) {
    ratios.push_back(std::exp(0.6 * rng.normal()));
    advs.push_back(rng.normal());
  }
  const std::vector<std::size_t> sizes = {1, 1};
  nn::ParameterSet p = nn::ParameterSet::mlp(sizes, 0);
  auto g = p.zeros_like();
  nn::Tape t;
  t.bind(p, g);
  const nn::Var obj = clip_objective(t, t.input(nn::Matrix::row(ratios)),
                                     t.input(nn::Matrix::row(advs)), 0.2);
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    CHECK(t.value(obj).data[i] == clip_objective(ratios[i], advs[i], 0.2));
  }
}

TEST_CASE("clip_objective: piecewise gradient, lower bound, monotone in epsilon") {
  Rng rng(3);
  std::vector<double> ratios, advs;
  for (int i = 0; i < 2000; ++i) {
    ratios.push_back(0.2 + 1.6 * rng.uniform());
    advs.push_back(3.0 * rng.normal());
  }
  for (double eps : {0.05, 0.1, 0.2, 0.3}) {
    const auto grad = objective_gradient(ratios, advs, eps);
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      const double r = ratios[i], a = advs[i];
      if ((a > 0 && r > 1 + eps) || (a < 0 && r < 1 - eps)) {
        REQUIRE(grad[i] == 0.0);
      } else if (std::fabs(r - 1) < eps) {
        REQUIRE(grad[i] == a);
      }
      REQUIRE(clip_objective(r, a, eps) <= r * a);
      REQUIRE(clip_objective(r, a, eps) <= clip_objective(r, a, eps + 0.05));
    }
  }
}

TEST_CASE("value_loss examples") {
  const std::vector<double> a = {1.0, -2.0, 3.0};
  CHECK(value_loss(a, a) == 0.0);
  CHECK(value_loss(std::vector<double>{0.0, 0.0}, std::vector<double>{2.0, 0.0}) == 2.0);
  Rng rng(4);
  std::vector<double> p(37), t(37);
  for (auto& v : p) v = rng.normal();
  for (auto& v : t) v = rng.normal();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - t[i]) * (p[i] - t[i]);
  CHECK(std::fabs(value_loss(p, t) - s / 37.0) < 1e-12);
  CHECK_THROWS_AS(value_loss(std::vector<double>{}, std::vector<double>{}), ConfigError);
}

TEST_CASE("PpoHyper validation") {
  PpoHyper h;
  CHECK_NOTHROW(h.validate());
  h.clip_epsilon = 0.0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h.allow_zero_epsilon = true;
  CHECK_NOTHROW(h.validate());
  h.clip_epsilon = 1.0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h = PpoHyper{};
  h.minibatch_size = 0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
}

TEST_CASE("clip_grad_norm scales jointly") {
  const std::vector<std::size_t> sizes = {1, 1};
  auto a = nn::ParameterSet::mlp(sizes);
  auto b = nn::ParameterSet::mlp(sizes);
  a.values()[0] = 3.0;
  b.values()[1] = 4.0;
  const double norm = clip_grad_norm(a, b, 0.5);
  CHECK(norm == 5.0);
  const double coef = 0.5 / (5.0 + 1e-6);
  CHECK(a.values()[0] == 3.0 * coef);
  CHECK(b.values()[1] == 4.0 * coef);
  auto c = a;
  auto d = b;
  clip_grad_norm(c, d, 10.0);
  CHECK(c == a);
  CHECK(d == b);
}

TEST_CASE("ppo_update: zero advantages leave the policy unchanged without entropy") {
  for (bool discrete : {false, true}) {
    Rng rng(5);
    NetworkConfig net;
    net.hidden = {8};
    ActorCritic ac;
    std::unique_ptr<envs::Env> env;
    if (discrete) {
      ac = ActorCritic(2, envs::ActionSpec::discrete_actions(4), net, rng);
      env = std::make_unique<envs::GridNav>();
    } else {
      ac = ActorCritic(3, envs::ActionSpec::box({-2.0}, {2.0}), net, rng);
      env = std::make_unique<envs::Pendulum>();
    }
    EnvCursor cursor(std::move(env));
    const auto traj = collect(ac, cursor, rng, 128);
    AdvantageBatch adv = compute_gae(traj, 0.99, 0.95);
    std::fill(adv.advantages.begin(), adv.advantages.end(), 0.0);
    PpoHyper h;
    h.minibatch_size = 32;
    h.update_epochs = 3;
    auto opt = make_optimizers(ac, nn::AdamConfig{});
    const auto before = ac;
    const auto stats = ppo_update(ac, traj, adv, h, opt, rng);
    CHECK_FALSE(stats.aborted);
    CHECK(ac.policy == before.policy);
    CHECK_FALSE(ac.value == before.value);

    ac = before;
    opt = make_optimizers(ac, nn::AdamConfig{});
    h.entropy_coef = 0.05;
    ppo_update(ac, traj, adv, h, opt, rng);
    CHECK_FALSE(ac.policy == before.policy);
  }
}

TEST_CASE("ppo_update: one-sample policy gradient at ratio 1 equals -A grad log pi") {
  auto b = pendulum_batch(6, 1);
  const std::vector<std::size_t> idx = {0};
  Minibatch mb = gather_minibatch(b.ac, b.traj, b.adv, idx);
  mb.advantages.data[0] = 0.7;
  PpoHyper h;
  h.value_coef = 0.0;
  const auto g = ppo_loss_grad(b.ac, mb, h);
  REQUIRE(g.ratios.size() == 1);
  CHECK(g.ratios[0] == doctest::Approx(1.0).epsilon(1e-12));

  const auto lg = nn::loss_grad(b.ac.policy, [&](nn::Tape& t, std::size_t hd) {
    const nn::Var mean = nn::mlp_forward(t, t.input(mb.observations), hd, b.ac.policy);
    return t.sum(nn::gaussian_logprob(t, mean, t.extra_row(hd), t.input(mb.actions)));
  });
  for (std::size_t i = 0; i < lg.grad.size(); ++i) {
    CHECK(g.policy.values()[i] == doctest::Approx(-0.7 * lg.grad.values()[i]).epsilon(1e-10));
  }
}

TEST_CASE("ppo_update: clip fraction recounts from the logged ratios") {
  auto b = pendulum_batch(7, 256);
  PpoHyper h;
  h.clip_epsilon = 0.05;
  h.minibatch_size = 64;
  h.update_epochs = 4;
  h.learning_rate = 3e-3;
  auto opt = make_optimizers(b.ac, nn::AdamConfig{});
  Rng rng(1);
  const auto stats = ppo_update(b.ac, b.traj, b.adv, h, opt, rng);
  REQUIRE(stats.ratios.size() == 256 * 4);
  std::size_t count = 0;
  double sum = 0.0;
  for (double r : stats.ratios) {
    count += std::fabs(r - 1.0) > h.clip_epsilon;
    sum += r;
  }
  CHECK(count > 0);
  CHECK(stats.clip_fraction == static_cast<double>(count) / stats.ratios.size());
  CHECK(stats.mean_ratio == doctest::Approx(sum / stats.ratios.size()).epsilon(1e-12));
  CHECK(stats.minibatches == 16);
  // The first minibatch is evaluated before any parameter change.
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(stats.ratios[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ppo_update is bit-reproducible") {
  auto run = [] {
    auto b = pendulum_batch(8, 200);
    PpoHyper h;
    h.minibatch_size = 50;
    auto opt = make_optimizers(b.ac, nn::AdamConfig{});
    Rng rng(99);
    const auto stats = ppo_update(b.ac, b.traj, b.adv, h, opt, rng);
    return std::make_tuple(b.ac, opt, stats.ratios, stats.policy_loss, stats.value_loss);
  };
  CHECK(run() == run());
}

TEST_CASE("ppo_update: non-finite data rolls back and reports") {
  auto b = pendulum_batch(9, 128);
  b.adv.advantages[77] = std::nan("");
  PpoHyper h;
  h.minibatch_size = 32;
  auto opt = make_optimizers(b.ac, nn::AdamConfig{});
  const auto ac_before = b.ac;
  const auto opt_before = opt;
  Rng rng(1);
  const auto stats = ppo_update(b.ac, b.traj, b.adv, h, opt, rng);
  CHECK(stats.aborted);
  CHECK(stats.failure.find("epoch 0") != std::string::npos);
  CHECK(b.ac == ac_before);
  CHECK(opt == opt_before);
}

TEST_CASE("ppo_update: log-std stays within its clamp") {
  auto b = pendulum_batch(10, 128);
  b.ac.policy.extra()[0] = 1.99;
  PpoHyper h;
  h.learning_rate = 0.5;
  h.entropy_coef = 10.0;
  auto opt = make_optimizers(b.ac, nn::AdamConfig{});
  Rng rng(2);
  ppo_update(b.ac, b.traj, b.adv, h, opt, rng);
  CHECK(b.ac.policy.extra()[0] <= nn::kLogStdMax);
  CHECK(b.ac.policy.extra()[0] >= nn::kLogStdMin);
  CHECK(b.ac.policy.all_finite());
}
