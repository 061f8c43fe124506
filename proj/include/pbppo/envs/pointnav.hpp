#ifndef PBPPO_ENVS_POINTNAV_HPP_
#define PBPPO_ENVS_POINTNAV_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "pbppo/envs/env.hpp"

namespace pbppo::envs {

struct Circle {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
  friend bool operator==(const Circle&, const Circle&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

// Arena geometry. The arena is [0, width] x [0, height]; its boundary walls
// are obstacles.
struct Layout {
  static constexpr int kFormatVersion = 1;

  std::string name;
  double width = 20.0;
  double height = 20.0;
  Point2 start;
  double start_heading = 0.0;
  std::vector<Point2> targets;  // visited in order
  std::vector<Circle> obstacles;

  friend bool operator==(const Layout&, const Layout&) = default;
};

// Line-oriented text format:
//   version 1
//   name <word>
//   arena <width> <height>
//   start <x> <y> <heading>
//   target <x> <y>            (repeated, in visiting order)
//   obstacle <x> <y> <radius> (repeated)
// '#' starts a comment. Unknown keys and unsupported versions are rejected.
Layout parse_layout(std::string_view text);
std::string format_layout(const Layout& layout);
Layout load_layout_file(const std::string& path);

// Built-in layouts: "easy", "medium", "hard".
Layout builtin_layout(std::string_view name);
std::string builtin_layout_text(std::string_view name);

struct NavTarget {
  Point2 position;
  bool visited = false;
  friend bool operator==(const NavTarget&, const NavTarget&) = default;
};

struct NavState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;          // radians, wrapped to (-pi, pi]
  std::vector<double> rays;      // range readings, (0, max_range]
  std::vector<NavTarget> targets;
  std::size_t active_target = 0;
  double target_distance = 0.0;  // to targets[active_target]
  double target_bearing = 0.0;   // relative to heading, (-pi, pi]
  bool done = false;

  double min_ray() const;
  friend bool operator==(const NavState&, const NavState&) = default;
};

struct NavAction {
  double speed = 0.0;
  double turn_rate = 0.0;
};

struct NavLimits {
  double speed_min = 0.0;
  double speed_max = 1.0;
  double turn_min = -1.0;
  double turn_max = 1.0;
};

struct RewardWeights {
  double collision = 1.0;
  double goal = 1.0;
  double approach = 1.0;
};

struct NavParams {
  double dt = 0.1;
  double safe_distance = 0.5;
  double detection_radius = 1.0;
  double contact_radius = 0.25;
  double max_range = 10.0;
  std::size_t num_rays = 16;
  int step_cap = 1000;
  double start_jitter = 0.5;
  NavLimits limits;
  RewardWeights weights;
};

// 1 when x >= 1, else 0.
double binary_gate(double x);

struct RewardTerms {
  double collision = 0.0;  // unweighted r_c
  double goal = 0.0;       // unweighted r_g
  double approach = 0.0;   // unweighted r_e
  double total = 0.0;      // weighted sum
};

// Reward for the transition prev -> cur. cur's target fields refer to the
// target that was active in prev. The goal bonus is paid only if that target
// was not already marked visited in prev.
RewardTerms pointnav_reward(const NavState& prev, const NavState& cur,
                            const RewardWeights& weights, const NavParams& params);

NavAction clamp_action(const NavAction& a, const NavLimits& limits);

// Distance from (x, y) along direction angle to the nearest obstacle or wall,
// capped at max_range. Returns a small positive value when (x, y) is already
// inside an obstacle or outside the arena.
double cast_ray(const Layout& layout, double x, double y, double angle, double max_range);

class PointNav final : public Env {
 public:
  explicit PointNav(Layout layout, NavParams params = {});

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::size_t observation_dim() const override { return params_.num_rays + 5; }
  ActionSpec action_spec() const override {
    return ActionSpec::box({params_.limits.speed_min, params_.limits.turn_min},
                           {params_.limits.speed_max, params_.limits.turn_max});
  }
  std::string name() const override { return "pointnav-" + layout_.name; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<PointNav>(*this); }

  const NavState& state() const { return state_; }
  const Layout& layout() const { return layout_; }
  const NavParams& params() const { return params_; }
  // Test hook: overwrite the pose and recompute sensor readings.
  void set_pose(double x, double y, double heading);

 private:
  void sense(NavState& s) const;
  std::vector<double> observe() const;

  Layout layout_;
  NavParams params_;
  NavState state_;
  int steps_ = 0;
  bool active_ = false;
};

}  // namespace pbppo::envs

#endif  // PBPPO_ENVS_POINTNAV_HPP_
