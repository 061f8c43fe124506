#include "pbppo/envs/pointnav.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "pbppo/envs/pendulum.hpp"
#include "pbppo/error.hpp"
#include "pbppo/rng.hpp"

namespace pbppo::envs {

namespace {

constexpr double kInsideDistance = 1e-6;

constexpr std::string_view kEasy = R"(# three obstacles
version 1
name easy
arena 20 20
start 2 2 0.7853981633974483
target 8 8
target 15 6
target 16 16
obstacle 5 10 1.0
obstacle 12 12 1.2
obstacle 11 4 0.8
)";

constexpr std::string_view kMedium = R"(# six obstacles
version 1
name medium
arena 20 20
start 2 2 0.7853981633974483
target 6 12
target 14 14
target 16 4
obstacle 5 6 1.0
obstacle 9 9 1.2
obstacle 4 15 1.0
obstacle 12 17 0.8
obstacle 15 9 1.0
obstacle 10 3 1.0
)";

constexpr std::string_view kHard = R"(# ten obstacles
version 1
name hard
arena 20 20
start 2 2 0.7853981633974483
target 10 10
target 17 17
target 3 17
obstacle 5 5 1.0
obstacle 8 12 1.0
obstacle 12 7 1.2
obstacle 14 13 1.0
obstacle 6 9 0.8
obstacle 15 4 1.0
obstacle 3 12 1.0
obstacle 11 16 1.0
obstacle 17 10 1.0
obstacle 7 17 0.8
)";

std::vector<double> read_numbers(std::istringstream& in, std::size_t n,
                                 const std::string& key, int line_no) {
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.size() != n) {
    throw ConfigError("layout line " + std::to_string(line_no) + ": '" + key +
                      "' expects " + std::to_string(n) + " numbers");
  }
  for (double x : out) {
    if (!std::isfinite(x)) {
      throw ConfigError("layout line " + std::to_string(line_no) + ": non-finite value");
    }
  }
  return out;
}

}  // namespace

Layout parse_layout(std::string_view text) {
  Layout layout;
  bool have_version = false;
  bool have_start = false;
  std::istringstream lines{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::string key;
    if (!(in >> key)) continue;
    if (key == "version") {
      const auto v = read_numbers(in, 1, key, line_no);
      if (v[0] != Layout::kFormatVersion) {
        throw ConfigError("layout: unsupported version " + std::to_string(v[0]));
      }
      have_version = true;
    } else if (key == "name") {
      if (!(in >> layout.name)) throw ConfigError("layout: 'name' needs a value");
    } else if (key == "arena") {
      const auto v = read_numbers(in, 2, key, line_no);
      layout.width = v[0];
      layout.height = v[1];
    } else if (key == "start") {
      const auto v = read_numbers(in, 3, key, line_no);
      layout.start = {v[0], v[1]};
      layout.start_heading = v[2];
      have_start = true;
    } else if (key == "target") {
      const auto v = read_numbers(in, 2, key, line_no);
      layout.targets.push_back({v[0], v[1]});
    } else if (key == "obstacle") {
      const auto v = read_numbers(in, 3, key, line_no);
      if (v[2] <= 0.0) throw ConfigError("layout: obstacle radius must be positive");
      layout.obstacles.push_back({v[0], v[1], v[2]});
    } else {
      throw ConfigError("layout line " + std::to_string(line_no) + ": unknown key '" +
                        key + "'");
    }
  }
  if (!have_version) throw ConfigError("layout: missing 'version'");
  if (!have_start) throw ConfigError("layout: missing 'start'");
  if (layout.targets.empty()) throw ConfigError("layout: at least one target required");
  if (layout.width <= 0.0 || layout.height <= 0.0) {
    throw ConfigError("layout: arena dimensions must be positive");
  }
  return layout;
}

std::string format_layout(const Layout& layout) {
  std::ostringstream out;
  out.precision(17);
  out << "version " << Layout::kFormatVersion << "\n";
  if (!layout.name.empty()) out << "name " << layout.name << "\n";
  out << "arena " << layout.width << " " << layout.height << "\n";
  out << "start " << layout.start.x << " " << layout.start.y << " "
      << layout.start_heading << "\n";
  for (const auto& t : layout.targets) out << "target " << t.x << " " << t.y << "\n";
  for (const auto& o : layout.obstacles) {
    out << "obstacle " << o.x << " " << o.y << " " << o.radius << "\n";
  }
  return out.str();
}

Layout load_layout_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open layout file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_layout(ss.str());
}

std::string builtin_layout_text(std::string_view name) {
  if (name == "easy") return std::string(kEasy);
  if (name == "medium") return std::string(kMedium);
  if (name == "hard") return std::string(kHard);
  throw ConfigError("unknown built-in layout '" + std::string(name) +
                    "' (expected easy, medium or hard)");
}

Layout builtin_layout(std::string_view name) { return parse_layout(builtin_layout_text(name)); }

double NavState::min_ray() const {
  return rays.empty() ? std::numeric_limits<double>::infinity()
                      : *std::min_element(rays.begin(), rays.end());
}

double binary_gate(double x) { return x >= 1.0 ? 1.0 : 0.0; }

RewardTerms pointnav_reward(const NavState& prev, const NavState& cur,
                            const RewardWeights& weights, const NavParams& params) {
  RewardTerms r;
  r.collision = -500.0 * binary_gate(params.safe_distance / cur.min_ray());
  const bool latched = cur.active_target < prev.targets.size() &&
                       prev.targets[cur.active_target].visited;
  if (!latched) {
    r.goal = 1000.0 * binary_gate(params.detection_radius / cur.target_distance);
  }
  r.approach = -0.2 + 5.0 * (prev.target_distance - cur.target_distance) +
               2.0 * wrap_angle(prev.target_bearing - cur.target_bearing);
  r.total = weights.collision * r.collision + weights.goal * r.goal +
            weights.approach * r.approach;
  return r;
}

NavAction clamp_action(const NavAction& a, const NavLimits& limits) {
  return {std::clamp(a.speed, limits.speed_min, limits.speed_max),
          std::clamp(a.turn_rate, limits.turn_min, limits.turn_max)};
}

double cast_ray(const Layout& layout, double x, double y, double angle, double max_range) {
  if (x <= 0.0 || y <= 0.0 || x >= layout.width || y >= layout.height) {
    return kInsideDistance;
  }
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  double best = max_range;
  // Walls.
  if (dx > 0.0) best = std::min(best, (layout.width - x) / dx);
  if (dx < 0.0) best = std::min(best, -x / dx);
  if (dy > 0.0) best = std::min(best, (layout.height - y) / dy);
  if (dy < 0.0) best = std::min(best, -y / dy);
  // Circles: |p + t d - c|^2 = r^2 with |d| = 1.
  for (const auto& c : layout.obstacles) {
    const double ox = x - c.x;
    const double oy = y - c.y;
    const double cc = ox * ox + oy * oy - c.radius * c.radius;
    if (cc <= 0.0) return kInsideDistance;
    const double b = ox * dx + oy * dy;
    const double disc = b * b - cc;
    if (disc < 0.0) continue;
    const double t = -b - std::sqrt(disc);
    if (t > 0.0) best = std::min(best, t);
  }
  return std::max(best, kInsideDistance);
}

PointNav::PointNav(Layout layout, NavParams params)
    : layout_(std::move(layout)), params_(params) {
  if (params_.num_rays == 0) throw ConfigError("pointnav: need at least one ray");
  if (layout_.targets.empty()) throw ConfigError("pointnav: layout has no targets");
}

void PointNav::sense(NavState& s) const {
  s.rays.resize(params_.num_rays);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(params_.num_rays);
  for (std::size_t k = 0; k < params_.num_rays; ++k) {
    s.rays[k] = cast_ray(layout_, s.x, s.y, s.heading + step * static_cast<double>(k),
                         params_.max_range);
  }
  const auto& t = s.targets[std::min(s.active_target, s.targets.size() - 1)].position;
  s.target_distance = std::hypot(t.x - s.x, t.y - s.y);
  s.target_bearing = wrap_angle(std::atan2(t.y - s.y, t.x - s.x) - s.heading);
}

std::vector<double> PointNav::observe() const {
  std::vector<double> obs;
  obs.reserve(observation_dim());
  for (double r : state_.rays) obs.push_back(r / params_.max_range);
  const double diag = std::hypot(layout_.width, layout_.height);
  obs.push_back(state_.target_distance / diag);
  obs.push_back(state_.heading / std::numbers::pi);
  obs.push_back(state_.target_bearing / std::numbers::pi);
  obs.push_back(std::cos(state_.target_bearing));
  obs.push_back(state_.done ? 1.0 : 0.0);
  return obs;
}

std::vector<double> PointNav::reset(std::uint64_t seed) {
  Rng rng(seed);
  state_ = NavState{};
  const double j = params_.start_jitter;
  state_.x = layout_.start.x + j * (2.0 * rng.uniform() - 1.0);
  state_.y = layout_.start.y + j * (2.0 * rng.uniform() - 1.0);
  state_.heading =
      wrap_angle(layout_.start_heading + 0.25 * std::numbers::pi * (2.0 * rng.uniform() - 1.0));
  for (const auto& t : layout_.targets) state_.targets.push_back({t, false});
  sense(state_);
  steps_ = 0;
  active_ = true;
  return observe();
}

void PointNav::set_pose(double x, double y, double heading) {
  state_.x = x;
  state_.y = y;
  state_.heading = wrap_angle(heading);
  sense(state_);
}

StepResult PointNav::step(std::span<const double> action) {
  if (!active_) throw EnvError("pointnav: step() called without reset()");
  if (action.size() != 2) throw EnvError("pointnav: expected (speed, turn_rate)");
  if (!std::isfinite(action[0]) || !std::isfinite(action[1])) {
    throw EnvError("pointnav: non-finite action");
  }
  const NavAction a = clamp_action({action[0], action[1]}, params_.limits);
  const NavState prev = state_;

  NavState cur = prev;
  cur.x += a.speed * std::cos(prev.heading) * params_.dt;
  cur.y += a.speed * std::sin(prev.heading) * params_.dt;
  cur.heading = wrap_angle(prev.heading + a.turn_rate * params_.dt);
  sense(cur);

  const RewardTerms terms = pointnav_reward(prev, cur, params_.weights, params_);
  ++steps_;

  StepResult r;
  r.reward = terms.total;
  r.info["r_collision"] = terms.collision;
  r.info["r_goal"] = terms.goal;
  r.info["r_approach"] = terms.approach;

  if (terms.goal != 0.0) {
    cur.targets[cur.active_target].visited = true;
    if (cur.active_target + 1 < cur.targets.size()) ++cur.active_target;
  }
  const bool all_visited = std::all_of(cur.targets.begin(), cur.targets.end(),
                                       [](const NavTarget& t) { return t.visited; });
  const bool collided = cur.min_ray() < params_.contact_radius;
  const bool capped = steps_ >= params_.step_cap;
  cur.done = all_visited || collided || capped;
  sense(cur);
  state_ = cur;

  r.done = cur.done;
  r.info["collision"] = collided ? 1.0 : 0.0;
  r.info["success"] = all_visited ? 1.0 : 0.0;
  r.info["truncated"] = (capped && !all_visited && !collided) ? 1.0 : 0.0;
  r.info["x"] = cur.x;
  r.info["y"] = cur.y;
  r.observation = observe();
  if (r.done) active_ = false;
  return r;
}

}  // namespace pbppo::envs
