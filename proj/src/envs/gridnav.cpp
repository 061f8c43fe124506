#include "pbppo/envs/gridnav.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "pbppo/error.hpp"

namespace pbppo::envs {

GridNav::GridNav(int size, std::vector<GridCell> walls)
    : size_(size), walls_(std::move(walls)) {
  if (size_ < 2) throw ConfigError("gridnav: size must be at least 2");
  for (const auto& w : walls_) {
    if (w == GridCell{0, 0} || w == goal()) {
      throw ConfigError("gridnav: walls may not cover start or goal");
    }
  }
}

bool GridNav::is_wall(GridCell c) const {
  if (c.x < 0 || c.y < 0 || c.x >= size_ || c.y >= size_) return true;
  return std::find(walls_.begin(), walls_.end(), c) != walls_.end();
}

std::vector<double> GridNav::observe() const {
  const double scale = 2.0 / static_cast<double>(size_ - 1);
  return {pos_.x * scale - 1.0, pos_.y * scale - 1.0};
}

std::vector<double> GridNav::reset(std::uint64_t /*seed*/) {
  pos_ = {0, 0};
  steps_ = 0;
  active_ = true;
  return observe();
}

StepResult GridNav::step(std::span<const double> action) {
  if (!active_) throw EnvError("gridnav: step() called without reset()");
  if (action.size() != 1) throw EnvError("gridnav: expected one discrete action");
  const double a = action[0];
  if (!(a >= 0.0 && a <= 3.0) || a != std::floor(a)) {
    throw EnvError("gridnav: action index out of range");
  }
  GridCell next = pos_;
  switch (static_cast<GridMove>(static_cast<int>(a))) {
    case GridMove::kUp: next.y += 1; break;
    case GridMove::kDown: next.y -= 1; break;
    case GridMove::kLeft: next.x -= 1; break;
    case GridMove::kRight: next.x += 1; break;
  }
  if (!is_wall(next)) pos_ = next;
  ++steps_;

  StepResult r;
  r.reward = -kStepCost;
  const bool at_goal = pos_ == goal();
  if (at_goal) r.reward += kGoalReward;
  const bool truncated = !at_goal && steps_ >= step_cap();
  r.done = at_goal || truncated;
  r.info["goal"] = at_goal ? 1.0 : 0.0;
  r.info["truncated"] = truncated ? 1.0 : 0.0;
  r.observation = observe();
  if (r.done) active_ = false;
  return r;
}

std::optional<int> GridNav::shortest_path_length() const {
  std::vector<int> dist(static_cast<std::size_t>(size_ * size_), -1);
  auto id = [&](GridCell c) { return static_cast<std::size_t>(c.y * size_ + c.x); };
  std::deque<GridCell> queue{{0, 0}};
  dist[id({0, 0})] = 0;
  while (!queue.empty()) {
    const GridCell c = queue.front();
    queue.pop_front();
    if (c == goal()) return dist[id(c)];
    const GridCell nbrs[] = {{c.x, c.y + 1}, {c.x, c.y - 1}, {c.x - 1, c.y}, {c.x + 1, c.y}};
    for (const auto& n : nbrs) {
      if (is_wall(n) || dist[id(n)] >= 0) continue;
      dist[id(n)] = dist[id(c)] + 1;
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

std::optional<double> GridNav::optimal_return() const {
  const auto len = shortest_path_length();
  if (!len || *len > step_cap()) return std::nullopt;
  return kGoalReward - kStepCost * static_cast<double>(*len);
}

}  // namespace pbppo::envs
