#ifndef PBPPO_TESTS_TEST_SUPPORT_HPP_
#define PBPPO_TESTS_TEST_SUPPORT_HPP_

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "pbppo/envs/env.hpp"
#include "pbppo/error.hpp"
#include "pbppo/harness/config.hpp"

namespace testing {

// Fresh directory under the system temp dir, unique per process.
inline std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("pbppo-tests-" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

// |a - b| <= rel * max(|a|, |b|) or |a - b| <= abs_floor.
inline bool close_rel(double a, double b, double rel, double abs_floor) {
  const double d = std::fabs(a - b);
  return d <= abs_floor || d <= rel * std::max(std::fabs(a), std::fabs(b));
}

// Observation = steps taken in the episode; reward 1 per step; done every
// `period` steps. Optionally throws on the n-th step overall.
class ScriptedEnv final : public pbppo::envs::Env {
 public:
  explicit ScriptedEnv(int period, int fault_at = -1) : period_(period), fault_at_(fault_at) {}

  std::vector<double> reset(std::uint64_t) override {
    t_ = 0;
    active_ = true;
    return {0.0};
  }
  pbppo::envs::StepResult step(std::span<const double>) override {
    if (!active_) throw pbppo::EnvError("step without reset");
    if (total_++ == fault_at_) throw std::runtime_error("scripted fault");
    ++t_;
    pbppo::envs::StepResult r;
    r.observation = {static_cast<double>(t_)};
    r.reward = 1.0;
    r.done = t_ == period_;
    if (r.done) active_ = false;
    return r;
  }
  std::size_t observation_dim() const override { return 1; }
  pbppo::envs::ActionSpec action_spec() const override {
    return pbppo::envs::ActionSpec::discrete_actions(2);
  }
  std::string name() const override { return "scripted"; }
  std::unique_ptr<pbppo::envs::Env> clone() const override {
    return std::make_unique<ScriptedEnv>(*this);
  }

 private:
  int period_;
  int fault_at_;
  int t_ = 0;
  int total_ = 0;
  bool active_ = false;
};

// A short gridnav configuration for harness-level tests.
inline pbppo::harness::TrainConfig quick_config() {
  pbppo::harness::TrainConfig c;
  c.env = "gridnav";
  c.horizon = 256;
  c.total_steps = 768;
  c.ppo.update_epochs = 2;
  c.hidden = {16, 16};
  c.eval_episodes = 1;
  return c;
}

}  // namespace testing

#endif  // PBPPO_TESTS_TEST_SUPPORT_HPP_
