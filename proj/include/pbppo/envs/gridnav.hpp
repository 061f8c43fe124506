#ifndef PBPPO_ENVS_GRIDNAV_HPP_
#define PBPPO_ENVS_GRIDNAV_HPP_

#include <optional>

#include "pbppo/envs/env.hpp"

namespace pbppo::envs {

enum class GridMove : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

struct GridCell {
  int x = 0;
  int y = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

// N x N grid, agent starts at (0, 0), goal at (N-1, N-1). Moves off the grid
// or into an interior wall leave the agent in place. Every step costs 0.01;
// reaching the goal additionally pays +1 and ends the episode. Episodes are
// capped at 4 N^2 steps. Observation: (x, y) scaled to [-1, 1].
class GridNav final : public Env {
 public:
  static constexpr double kStepCost = 0.01;
  static constexpr double kGoalReward = 1.0;

  explicit GridNav(int size = 8, std::vector<GridCell> walls = {});

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::size_t observation_dim() const override { return 2; }
  ActionSpec action_spec() const override { return ActionSpec::discrete_actions(4); }
  std::string name() const override { return "gridnav"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<GridNav>(*this); }

  int size() const { return size_; }
  GridCell position() const { return pos_; }
  GridCell goal() const { return {size_ - 1, size_ - 1}; }
  int step_cap() const { return 4 * size_ * size_; }
  bool is_wall(GridCell c) const;
  // Test hook: place the agent (episode must be active).
  void set_position(GridCell c) { pos_ = c; }

  // Shortest-path optimal return from the start via breadth-first search;
  // empty if the goal is unreachable within the step cap.
  std::optional<double> optimal_return() const;
  std::optional<int> shortest_path_length() const;

 private:
  std::vector<double> observe() const;

  int size_;
  std::vector<GridCell> walls_;
  GridCell pos_;
  int steps_ = 0;
  bool active_ = false;
};

}  // namespace pbppo::envs

#endif  // PBPPO_ENVS_GRIDNAV_HPP_
