#include "pbppo/envs/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pbppo/error.hpp"
#include "pbppo/rng.hpp"

namespace pbppo::envs {

double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  w -= kPi;
  // fmod lands on -pi for odd multiples of pi; the range is (-pi, pi].
  return w == -kPi ? kPi : w;
}

PendulumTransition pendulum_step(const PendulumParams& p, PendulumState s, double torque) {
  const double u = std::clamp(torque, -p.max_torque, p.max_torque);
  const double th = wrap_angle(s.angle);
  PendulumTransition t;
  t.reward = -(th * th + 0.1 * s.velocity * s.velocity + 0.001 * u * u);
  const double accel = 3.0 * p.gravity / (2.0 * p.length) * std::sin(s.angle) +
                       3.0 * u / (p.mass * p.length * p.length);
  t.next.velocity = std::clamp(s.velocity + accel * p.dt, -p.max_speed, p.max_speed);
  t.next.angle = s.angle + t.next.velocity * p.dt;
  return t;
}

std::vector<double> Pendulum::observe() const {
  return {std::cos(state_.angle), std::sin(state_.angle), state_.velocity};
}

std::vector<double> Pendulum::reset(std::uint64_t seed) {
  Rng rng(seed);
  state_.angle = (2.0 * rng.uniform() - 1.0) * std::numbers::pi;
  state_.velocity = 2.0 * rng.uniform() - 1.0;
  steps_ = 0;
  active_ = true;
  return observe();
}

StepResult Pendulum::step(std::span<const double> action) {
  if (!active_) throw EnvError("pendulum: step() called without reset()");
  if (action.size() != 1) throw EnvError("pendulum: expected a one-dimensional torque");
  if (!std::isfinite(action[0])) throw EnvError("pendulum: non-finite torque");
  const auto t = pendulum_step(params_, state_, action[0]);
  state_ = t.next;
  ++steps_;
  StepResult r;
  r.reward = t.reward;
  r.done = steps_ >= params_.horizon;
  r.info["truncated"] = r.done ? 1.0 : 0.0;
  r.observation = observe();
  if (r.done) active_ = false;
  return r;
}

}  // namespace pbppo::envs
