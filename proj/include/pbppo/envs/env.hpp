#ifndef PBPPO_ENVS_ENV_HPP_
#define PBPPO_ENVS_ENV_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pbppo::envs {

// Continuous box with per-dimension limits, or a discrete count. Discrete
// actions travel as a one-element vector holding the index.
struct ActionSpec {
  bool discrete = false;
  std::size_t count = 0;  // discrete only
  std::vector<double> low;
  std::vector<double> high;

  std::size_t dim() const { return discrete ? 1 : low.size(); }

  static ActionSpec discrete_actions(std::size_t n) {
    ActionSpec s;
    s.discrete = true;
    s.count = n;
    return s;
  }
  static ActionSpec box(std::vector<double> lo, std::vector<double> hi) {
    ActionSpec s;
    s.low = std::move(lo);
    s.high = std::move(hi);
    return s;
  }
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  std::map<std::string, double> info;
};

// Episodic environment. reset() must precede the first step() and every
// step() following a terminal transition; violating that throws EnvError.
class Env {
 public:
  virtual ~Env() = default;

  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
  virtual std::size_t observation_dim() const = 0;
  virtual ActionSpec action_spec() const = 0;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Env> clone() const = 0;
};

}  // namespace pbppo::envs

#endif  // PBPPO_ENVS_ENV_HPP_
