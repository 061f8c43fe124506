#ifndef PBPPO_ENVS_PENDULUM_HPP_
#define PBPPO_ENVS_PENDULUM_HPP_

#include "pbppo/envs/env.hpp"

namespace pbppo::envs {

struct PendulumState {
  double angle = 0.0;  // radians, 0 = upright
  double velocity = 0.0;
};

struct PendulumParams {
  double gravity = 10.0;
  double mass = 1.0;
  double length = 1.0;
  double dt = 0.05;
  double max_speed = 8.0;
  double max_torque = 2.0;
  int horizon = 200;
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

// Cost is charged on the pre-step state and the clamped torque. Integration
// is semi-implicit Euler: velocity first (then clamped), angle with the new
// velocity.
struct PendulumTransition {
  PendulumState next;
  double reward = 0.0;
};
PendulumTransition pendulum_step(const PendulumParams& p, PendulumState s, double torque);

// Swing-up task; reset draws angle in [-pi, pi] and velocity in [-1, 1].
// Observation (cos angle, sin angle, velocity); fixed 200-step episodes.
class Pendulum final : public Env {
 public:
  explicit Pendulum(PendulumParams params = {}) : params_(params) {}

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::size_t observation_dim() const override { return 3; }
  ActionSpec action_spec() const override {
    return ActionSpec::box({-params_.max_torque}, {params_.max_torque});
  }
  std::string name() const override { return "pendulum"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<Pendulum>(*this); }

  const PendulumState& state() const { return state_; }
  void set_state(PendulumState s) { state_ = s; }

 private:
  std::vector<double> observe() const;

  PendulumParams params_;
  PendulumState state_;
  int steps_ = 0;
  bool active_ = false;
};

}  // namespace pbppo::envs

#endif  // PBPPO_ENVS_PENDULUM_HPP_
