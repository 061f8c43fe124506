#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pbppo/envs/gridnav.hpp"
#include "pbppo/envs/pendulum.hpp"
#include "pbppo/envs/pointnav.hpp"
#include "pbppo/envs/registry.hpp"
#include "pbppo/error.hpp"
#include "pbppo/rng.hpp"

using namespace pbppo;
using namespace pbppo::envs;

namespace {

StepResult act(Env& env, std::vector<double> a) { return env.step(a); }

NavState nav_state(double min_ray, double distance, double bearing, bool visited = false) {
  NavState s;
  s.rays = {5.0, min_ray, 7.0};
  s.targets = {{{0.0, 0.0}, visited}};
  s.target_distance = distance;
  s.target_bearing = bearing;
  return s;
}

Layout open_layout() {
  Layout l;
  l.name = "open";
  l.start = {2.0, 2.0};
  l.targets = {{10.0, 2.0}, {10.0, 10.0}};
  return l;
}

}  // namespace

TEST_CASE("gridnav: stepping onto the goal pays +1 and ends the episode") {
  GridNav g;
  g.reset(0);
  g.set_position({7, 6});
  const auto r = act(g, {static_cast<double>(GridMove::kUp)});
  CHECK(r.done);
  CHECK(r.reward == doctest::Approx(1.0 - GridNav::kStepCost).epsilon(1e-15));
  CHECK(r.info.at("goal") == 1.0);
}

TEST_CASE("gridnav: walls and edges block movement") {
  GridNav g(8, {{1, 0}});
  g.reset(0);
  auto r = act(g, {static_cast<double>(GridMove::kRight)});
  CHECK(g.position() == GridCell{0, 0});
  CHECK(r.reward == -0.01);
  r = act(g, {static_cast<double>(GridMove::kLeft)});
  CHECK(g.position() == GridCell{0, 0});
  CHECK(r.reward == -0.01);
  CHECK_FALSE(r.done);
}

TEST_CASE("gridnav: optimal return by breadth-first search") {
  GridNav g;
  REQUIRE(g.optimal_return().has_value());
  CHECK(*g.shortest_path_length() == 14);
  CHECK(*g.optimal_return() == doctest::Approx(0.86).epsilon(1e-14));

  // Walking the path reproduces the BFS value.
  g.reset(0);
  double ret = 0.0;
  for (int i = 0; i < 7; ++i) ret += act(g, {3.0}).reward;
  StepResult last;
  for (int i = 0; i < 7; ++i) {
    last = act(g, {0.0});
    ret += last.reward;
  }
  CHECK(last.done);
  CHECK(ret == doctest::Approx(0.86).epsilon(1e-12));

  GridNav blocked(4, {{1, 0}, {1, 1}, {1, 2}, {1, 3}});
  CHECK_FALSE(blocked.optimal_return().has_value());
  GridNav detour(4, {{1, 0}, {1, 1}, {1, 2}});
  CHECK(*detour.shortest_path_length() == 6);
}

TEST_CASE("gridnav: episode cap and step-after-done") {
  GridNav g(3);
  g.reset(0);
  StepResult r;
  for (int i = 0; i < g.step_cap(); ++i) {
    REQUIRE_FALSE(r.done);
    r = act(g, {2.0});
  }
  CHECK(r.done);
  CHECK(r.info.at("truncated") == 1.0);
  CHECK_THROWS_AS(act(g, {2.0}), EnvError);
  GridNav fresh;
  CHECK_THROWS_AS(act(fresh, {0.0}), EnvError);
  fresh.reset(0);
  CHECK_THROWS_AS(act(fresh, {4.0}), EnvError);
  CHECK_THROWS_AS(act(fresh, {0.5}), EnvError);
}

TEST_CASE("pendulum_step examples") {
  const PendulumParams p;
  const auto up = pendulum_step(p, {0.0, 0.0}, 0.0);
  CHECK(up.reward == 0.0);
  CHECK(up.next.angle == 0.0);
  CHECK(up.next.velocity == 0.0);

  const auto down = pendulum_step(p, {std::numbers::pi, 0.0}, 0.0);
  CHECK(down.reward == doctest::Approx(-std::numbers::pi * std::numbers::pi).epsilon(1e-15));
  CHECK(std::fabs(down.reward + 9.8696) < 1e-4);
}

TEST_CASE("pendulum_step matches an independent integration") {
  const PendulumParams p;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double th = 4.0 * std::numbers::pi * (rng.uniform() - 0.5);
    const double w = 16.0 * (rng.uniform() - 0.5);
    const double u = 6.0 * (rng.uniform() - 0.5);
    const auto t = pendulum_step(p, {th, w}, u);

    const double uc = std::fmin(2.0, std::fmax(-2.0, u));
    const double wdot = 3.0 * 10.0 / 2.0 * std::sin(th) + 3.0 * uc;
    const double w1 = std::fmin(8.0, std::fmax(-8.0, w + 0.05 * wdot));
    const double th1 = th + 0.05 * w1;
    const double tw = std::remainder(th, 2.0 * std::numbers::pi);
    const double cost = tw * tw + 0.1 * w * w + 0.001 * uc * uc;
    REQUIRE(std::fabs(t.next.velocity - w1) < 1e-12);
    REQUIRE(std::fabs(t.next.angle - th1) < 1e-12);
    REQUIRE(std::fabs(t.reward + cost) < 1e-12);
    REQUIRE(t.reward <= 0.0);
    if (t.reward == 0.0) REQUIRE(wrap_angle(th) == 0.0);
  }
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(std::numbers::pi) == std::numbers::pi);
  CHECK(wrap_angle(-std::numbers::pi) == std::numbers::pi);
  CHECK(wrap_angle(0.5) == 0.5);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(100.0 * (rng.uniform() - 0.5));
    REQUIRE(w > -std::numbers::pi);
    REQUIRE(w <= std::numbers::pi);
  }
}

TEST_CASE("pendulum: fixed 200-step episodes") {
  Pendulum env;
  env.reset(4);
  StepResult r;
  int steps = 0;
  while (!r.done) {
    r = act(env, {0.3});
    ++steps;
  }
  CHECK(steps == 200);
  CHECK_THROWS_AS(act(env, {0.0}), EnvError);
  env.reset(4);
  CHECK_THROWS_AS(act(env, {std::nan("")}), EnvError);
}

TEST_CASE("pointnav_reward examples") {
  const NavParams params;
  const RewardWeights w;

  const auto collide = pointnav_reward(nav_state(5.0, 3.0, 0.0), nav_state(0.2, 3.0, 0.0), w,
                                       params);
  CHECK(std::fabs(collide.collision - -500.0) < 1e-12);
  CHECK(std::fabs(collide.total - (-500.0 - 0.2)) < 1e-12);

  const auto clear = pointnav_reward(nav_state(5.0, 3.0, 0.0), nav_state(0.6, 3.0, 0.0), w,
                                     params);
  CHECK(clear.collision == 0.0);

  // bin(1) = 1: the penalty fires at exactly the safe distance.
  const auto edge = pointnav_reward(nav_state(5.0, 3.0, 0.0), nav_state(0.5, 3.0, 0.0), w,
                                    params);
  CHECK(edge.collision == -500.0);

  const auto approach = pointnav_reward(nav_state(5.0, 5.0, 1.0), nav_state(5.0, 4.0, 0.5), w,
                                        params);
  CHECK(std::fabs(approach.approach - 5.8) < 1e-12);
  CHECK(approach.goal == 0.0);
  CHECK(std::fabs(approach.total - 5.8) < 1e-12);

  RewardWeights half;
  half.collision = 0.5;
  half.approach = 2.0;
  const auto weighted = pointnav_reward(nav_state(5.0, 5.0, 1.0), nav_state(0.2, 4.0, 0.5), half,
                                        params);
  CHECK(std::fabs(weighted.total - (0.5 * -500.0 + 2.0 * 5.8)) < 1e-12);
}

TEST_CASE("pointnav_reward: goal bonus is paid once per target") {
  const NavParams params;
  const RewardWeights w;
  const auto first = pointnav_reward(nav_state(5.0, 1.2, 0.0), nav_state(5.0, 0.9, 0.0), w,
                                     params);
  CHECK(first.goal == 1000.0);
  const auto again = pointnav_reward(nav_state(5.0, 0.9, 0.0, true),
                                     nav_state(5.0, 0.8, 0.0, true), w, params);
  CHECK(again.goal == 0.0);
  const auto at_radius = pointnav_reward(nav_state(5.0, 1.2, 0.0), nav_state(5.0, 1.0, 0.0), w,
                                         params);
  CHECK(at_radius.goal == 1000.0);
}

TEST_CASE("pointnav_reward: bearing differences are wrapped") {
  const NavParams params;
  const RewardWeights w;
  const double pi = std::numbers::pi;
  const auto r = pointnav_reward(nav_state(5.0, 4.0, pi - 0.05), nav_state(5.0, 4.0, -pi + 0.05),
                                 w, params);
  CHECK(std::fabs(r.approach - (-0.2 + 2.0 * -0.1)) < 1e-12);
}

TEST_CASE("pointnav: null action keeps the pose and pays -0.2") {
  PointNav env(open_layout());
  env.reset(1);
  const auto before = env.state();
  const auto r = act(env, {0.0, 0.0});
  CHECK(env.state().x == before.x);
  CHECK(env.state().y == before.y);
  CHECK(env.state().heading == before.heading);
  CHECK(r.reward == doctest::Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("pointnav: heading straight at the target closes distance by v dt") {
  PointNav env(open_layout());
  env.reset(1);
  env.set_pose(4.0, 2.0, 0.0);
  const double d0 = env.state().target_distance;
  const auto r = act(env, {1.0, 0.0});
  CHECK(env.state().target_distance == doctest::Approx(d0 - 0.1).epsilon(1e-12));
  CHECK(r.info.at("r_approach") == doctest::Approx(-0.2 + 5.0 * 0.1).epsilon(1e-12));
  CHECK(r.reward > 0.0);
}

TEST_CASE("pointnav: actions are clamped") {
  const NavLimits lim;
  const auto a = clamp_action({3.0, -4.0}, lim);
  CHECK(a.speed == 1.0);
  CHECK(a.turn_rate == -1.0);
  PointNav env(open_layout());
  env.reset(1);
  env.set_pose(4.0, 2.0, 0.0);
  act(env, {5.0, 0.0});
  CHECK(env.state().x == doctest::Approx(4.1).epsilon(1e-12));
}

TEST_CASE("pointnav: reaching the target advances and latches") {
  PointNav env(open_layout());
  env.reset(1);
  env.set_pose(8.95, 2.0, 0.0);
  const auto r = act(env, {1.0, 0.0});
  CHECK(r.info.at("r_goal") == 1000.0);
  CHECK(env.state().targets[0].visited);
  CHECK(env.state().active_target == 1);
  CHECK_FALSE(r.done);
}

TEST_CASE("pointnav: collision penalty and termination near obstacles") {
  Layout l = open_layout();
  l.obstacles = {{6.0, 2.0, 1.0}};
  PointNav env(l);
  env.reset(1);
  env.set_pose(4.6, 2.0, 0.0);
  const auto r = act(env, {1.0, 0.0});
  CHECK(r.info.at("r_collision") == -500.0);
  CHECK_FALSE(r.done);
  env.set_pose(4.8, 2.0, 0.0);
  const auto hit = act(env, {0.0, 0.0});
  CHECK(hit.done);
  CHECK(hit.info.at("collision") == 1.0);
}

TEST_CASE("pointnav: rays and bearings stay in range along random episodes") {
  for (const char* name : {"easy", "medium", "hard"}) {
    PointNav env(builtin_layout(name));
    Rng rng(7);
    env.reset(3);
    for (int t = 0; t < 300; ++t) {
      const auto r = act(env, {rng.uniform(), 2.0 * rng.uniform() - 1.0});
      for (double ray : env.state().rays) {
        REQUIRE(ray > 0.0);
        REQUIRE(ray <= env.params().max_range);
      }
      REQUIRE(env.state().target_bearing > -std::numbers::pi);
      REQUIRE(env.state().target_bearing <= std::numbers::pi);
      REQUIRE(env.state().heading > -std::numbers::pi);
      REQUIRE(env.state().heading <= std::numbers::pi);
      if (r.done) env.reset(static_cast<std::uint64_t>(t));
    }
  }
}

TEST_CASE("layouts: text round trip and rejection") {
  for (const char* name : {"easy", "medium", "hard"}) {
    const Layout l = builtin_layout(name);
    CHECK(parse_layout(format_layout(l)) == l);
    CHECK(l.targets.size() == 3);
  }
  CHECK(builtin_layout("easy").obstacles.size() == 3);
  CHECK(builtin_layout("medium").obstacles.size() == 6);
  CHECK(builtin_layout("hard").obstacles.size() == 10);
  CHECK_THROWS_AS(parse_layout("version 2\nname x\narena 5 5\nstart 1 1 0\ntarget 2 2\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_layout("version 1\nname x\ncolour red\n"), ConfigError);
  CHECK_THROWS_AS(builtin_layout("nightmare"), ConfigError);
}

TEST_CASE("environments are deterministic under seed and actions") {
  for (const auto& name : env_names()) {
    auto run = [&] {
      auto env = make_env(name);
      Rng rng(11);
      std::vector<double> trace = env->reset(5);
      const auto spec = env->action_spec();
      for (int t = 0; t < 250; ++t) {
        std::vector<double> a;
        if (spec.discrete) {
          a = {static_cast<double>(rng.below(spec.count))};
        } else {
          for (std::size_t d = 0; d < spec.dim(); ++d) {
            a.push_back(spec.low[d] + (spec.high[d] - spec.low[d]) * rng.uniform());
          }
        }
        const auto r = env->step(a);
        trace.insert(trace.end(), r.observation.begin(), r.observation.end());
        trace.push_back(r.reward);
        if (r.done) {
          const auto obs = env->reset(static_cast<std::uint64_t>(t));
          trace.insert(trace.end(), obs.begin(), obs.end());
        }
      }
      return trace;
    };
    CHECK(run() == run());
  }
  CHECK_FALSE(is_known_env("mujoco"));
  CHECK_THROWS_AS(make_env("mujoco"), ConfigError);
}
