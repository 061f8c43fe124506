#include "pbppo/envs/registry.hpp"

#include <algorithm>

#include "pbppo/envs/gridnav.hpp"
#include "pbppo/envs/pendulum.hpp"
#include "pbppo/envs/pointnav.hpp"
#include "pbppo/error.hpp"

namespace pbppo::envs {

const std::vector<std::string>& env_names() {
  static const std::vector<std::string> names = {
      "gridnav", "pendulum", "pointnav-easy", "pointnav-medium", "pointnav-hard"};
  return names;
}

bool is_known_env(const std::string& name) {
  const auto& n = env_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::unique_ptr<Env> make_env(const std::string& name, const std::string& layout_path) {
  if (name == "gridnav") return std::make_unique<GridNav>(8);
  if (name == "pendulum") return std::make_unique<Pendulum>();
  const std::string prefix = "pointnav-";
  if (name.rfind(prefix, 0) == 0) {
    Layout layout = layout_path.empty() ? builtin_layout(name.substr(prefix.size()))
                                        : load_layout_file(layout_path);
    if (layout.name.empty()) layout.name = name.substr(prefix.size());
    return std::make_unique<PointNav>(std::move(layout));
  }
  throw ConfigError("unknown environment '" + name +
                    "' (expected gridnav, pendulum, pointnav-easy, pointnav-medium or "
                    "pointnav-hard)");
}

}  // namespace pbppo::envs
