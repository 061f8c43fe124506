#include "pbppo/cli/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "pbppo/error.hpp"

extern char** environ;

namespace pbppo::cli {

namespace {

using nlohmann::json;
using harness::TrainConfig;

struct Setting {
  std::string key;
  std::string help;
  std::function<json(const TrainConfig&)> get;
  std::function<void(TrainConfig&, const json&)> set;
  // Converts flag/environment text to the JSON form accepted by set.
  std::function<json(const std::string&)> parse_text;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

double as_double(const std::string& key, const json& v) {
  if (!v.is_number()) bad_value(key, "expected a number");
  return v.get<double>();
}

std::uint64_t as_u64(const std::string& key, const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  bad_value(key, "expected a non-negative integer");
}

std::int64_t as_i64(const std::string& key, const json& v) {
  if (!v.is_number_integer()) bad_value(key, "expected an integer");
  return v.get<std::int64_t>();
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) bad_value(key, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) bad_value(key, "expected a string");
  return v.get<std::string>();
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

json text_double(const std::string& key, const std::string& t) {
  const std::string s = trim(t);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad_value(key, "'" + t + "' is not a number");
  return v;
}

json text_int(const std::string& key, const std::string& t) {
  const std::string s = trim(t);
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    bad_value(key, "'" + t + "' is not an integer");
  }
  return v;
}

json text_bool(const std::string& key, const std::string& t) {
  const std::string s = trim(t);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, "'" + t + "' is not a boolean");
}

json text_string(const std::string&, const std::string& t) { return t; }

json text_size_list(const std::string& key, const std::string& t) {
  json arr = json::array();
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) arr.push_back(text_int(key, item));
  return arr;
}

json text_optional_double(const std::string& key, const std::string& t) {
  const std::string s = trim(t);
  if (s == "auto" || s == "none" || s.empty()) return nullptr;
  return text_double(key, s);
}

#define PBPPO_DOUBLE(KEY, HELP, FIELD)                                            \
  Setting {                                                                       \
    KEY, HELP, [](const TrainConfig& c) -> json { return c.FIELD; },              \
        [](TrainConfig& c, const json& v) { c.FIELD = as_double(KEY, v); },        \
        [](const std::string& t) { return text_double(KEY, t); }                  \
  }

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      {"env", "environment: gridnav, pendulum, pointnav-easy, pointnav-medium, pointnav-hard",
       [](const TrainConfig& c) -> json { return c.env; },
       [](TrainConfig& c, const json& v) { c.env = as_string("env", v); },
       [](const std::string& t) { return text_string("env", t); }},
      {"layout", "pointnav layout file (empty = built-in)",
       [](const TrainConfig& c) -> json { return c.layout_path; },
       [](TrainConfig& c, const json& v) { c.layout_path = as_string("layout", v); },
       [](const std::string& t) { return text_string("layout", t); }},
      {"algo", "ppo-fixed, pb-ppo-wi-ad or pb-ppo-wo-ad",
       [](const TrainConfig& c) -> json { return harness::to_string(c.algorithm); },
       [](TrainConfig& c, const json& v) {
         c.algorithm = harness::parse_algorithm(as_string("algo", v));
       },
       [](const std::string& t) { return text_string("algo", t); }},
      PBPPO_DOUBLE("clip", "fixed clipping bound for ppo-fixed, in (0,1)", fixed_epsilon),
      PBPPO_DOUBLE("bounds-min", "smallest candidate clipping bound", bandit.bounds_min),
      PBPPO_DOUBLE("bounds-max", "largest candidate clipping bound", bandit.bounds_max),
      {"bounds-n", "number of candidate clipping bounds",
       [](const TrainConfig& c) -> json { return c.bandit.bounds_n; },
       [](TrainConfig& c, const json& v) {
         const auto n = as_i64("bounds-n", v);
         if (n < 1 || n > 100000) bad_value("bounds-n", "must be >= 1");
         c.bandit.bounds_n = static_cast<int>(n);
       },
       [](const std::string& t) { return text_int("bounds-n", t); }},
      PBPPO_DOUBLE("lambda", "weight of the UCB uncertainty term", bandit.lambda),
      PBPPO_DOUBLE("bandit-gamma", "discount applied to arm expectations", bandit.gamma),
      {"bandit-mode", "uncertainty term: visitation or hoeffding",
       [](const TrainConfig& c) -> json { return harness::to_string(c.bandit.mode); },
       [](TrainConfig& c, const json& v) {
         c.bandit.mode = harness::parse_uncertainty_mode(as_string("bandit-mode", v));
       },
       [](const std::string& t) { return text_string("bandit-mode", t); }},
      {"sigma", "hoeffding uncertainty factor in (0,1)",
       [](const TrainConfig& c) -> json {
         return c.bandit.sigma ? json(*c.bandit.sigma) : json(nullptr);
       },
       [](TrainConfig& c, const json& v) {
         if (v.is_null()) {
           c.bandit.sigma.reset();
         } else {
           c.bandit.sigma = as_double("sigma", v);
         }
       },
       [](const std::string& t) { return text_optional_double("sigma", t); }},
      {"bandit-rule", "expectation update: recency or forward-discount",
       [](const TrainConfig& c) -> json { return harness::to_string(c.bandit.rule); },
       [](TrainConfig& c, const json& v) {
         c.bandit.rule = harness::parse_expectation_rule(as_string("bandit-rule", v));
       },
       [](const std::string& t) { return text_string("bandit-rule", t); }},
      {"allow-zero-bound", "permit a clipping bound of exactly 0",
       [](const TrainConfig& c) -> json { return c.bandit.allow_zero_bound; },
       [](TrainConfig& c, const json& v) {
         c.bandit.allow_zero_bound = as_bool("allow-zero-bound", v);
       },
       [](const std::string& t) { return text_bool("allow-zero-bound", t); }},
      {"epochs", "PPO epochs per iteration",
       [](const TrainConfig& c) -> json { return c.ppo.update_epochs; },
       [](TrainConfig& c, const json& v) {
         const auto n = as_i64("epochs", v);
         if (n < 1 || n > 100000) bad_value("epochs", "must be >= 1");
         c.ppo.update_epochs = static_cast<int>(n);
       },
       [](const std::string& t) { return text_int("epochs", t); }},
      {"minibatch", "PPO minibatch size",
       [](const TrainConfig& c) -> json { return c.ppo.minibatch_size; },
       [](TrainConfig& c, const json& v) { c.ppo.minibatch_size = as_u64("minibatch", v); },
       [](const std::string& t) { return text_int("minibatch", t); }},
      PBPPO_DOUBLE("value-coef", "value-loss weight", ppo.value_coef),
      {"entropy-coef", "entropy bonus weight (auto: 0.01 discrete, 0 continuous)",
       [](const TrainConfig& c) -> json {
         return c.entropy_coef ? json(*c.entropy_coef) : json(nullptr);
       },
       [](TrainConfig& c, const json& v) {
         if (v.is_null()) {
           c.entropy_coef.reset();
         } else {
           c.entropy_coef = as_double("entropy-coef", v);
         }
       },
       [](const std::string& t) { return text_optional_double("entropy-coef", t); }},
      PBPPO_DOUBLE("max-grad-norm", "global gradient-norm clip", ppo.max_grad_norm),
      PBPPO_DOUBLE("lr", "Adam learning rate", ppo.learning_rate),
      PBPPO_DOUBLE("gamma", "reward discount", gamma),
      PBPPO_DOUBLE("gae-lambda", "GAE lambda", gae_lambda),
      {"horizon", "environment steps collected per iteration",
       [](const TrainConfig& c) -> json { return c.horizon; },
       [](TrainConfig& c, const json& v) { c.horizon = as_u64("horizon", v); },
       [](const std::string& t) { return text_int("horizon", t); }},
      {"eval-episodes", "evaluation episodes per iteration (k)",
       [](const TrainConfig& c) -> json { return c.eval_episodes; },
       [](TrainConfig& c, const json& v) {
         const auto n = as_i64("eval-episodes", v);
         if (n < 1 || n > 1000000) bad_value("eval-episodes", "must be >= 1");
         c.eval_episodes = static_cast<int>(n);
       },
       [](const std::string& t) { return text_int("eval-episodes", t); }},
      {"steps", "training environment-step budget",
       [](const TrainConfig& c) -> json { return c.total_steps; },
       [](TrainConfig& c, const json& v) { c.total_steps = as_u64("steps", v); },
       [](const std::string& t) { return text_int("steps", t); }},
      {"seed", "random seed",
       [](const TrainConfig& c) -> json { return c.seed; },
       [](TrainConfig& c, const json& v) { c.seed = as_u64("seed", v); },
       [](const std::string& t) { return text_int("seed", t); }},
      {"out", "output directory",
       [](const TrainConfig& c) -> json { return c.output_dir; },
       [](TrainConfig& c, const json& v) { c.output_dir = as_string("out", v); },
       [](const std::string& t) { return text_string("out", t); }},
      {"hidden", "hidden layer sizes, comma separated",
       [](const TrainConfig& c) -> json { return c.hidden; },
       [](TrainConfig& c, const json& v) {
         if (!v.is_array()) bad_value("hidden", "expected a list of layer sizes");
         std::vector<std::size_t> h;
         for (const auto& e : v) h.push_back(as_u64("hidden", e));
         c.hidden = std::move(h);
       },
       [](const std::string& t) { return text_size_list("hidden", t); }},
      PBPPO_DOUBLE("init-log-std", "initial Gaussian log-std", init_log_std),
      {"parallel-kernels", "use the OpenMP kernels when available",
       [](const TrainConfig& c) -> json { return c.parallel_kernels; },
       [](TrainConfig& c, const json& v) {
         c.parallel_kernels = as_bool("parallel-kernels", v);
       },
       [](const std::string& t) { return text_bool("parallel-kernels", t); }},
      {"wall-clock", "write measured wall time into metrics.csv (breaks byte-reproducibility)",
       [](const TrainConfig& c) -> json { return c.record_wall_clock; },
       [](TrainConfig& c, const json& v) { c.record_wall_clock = as_bool("wall-clock", v); },
       [](const std::string& t) { return text_bool("wall-clock", t); }},
  };
  return table;
}

#undef PBPPO_DOUBLE

const Setting& find_setting(const std::string& key) {
  for (const auto& s : settings()) {
    if (s.key == key) return s;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

std::string env_name_for(const std::string& key) {
  std::string out = kEnvPrefix;
  for (char c : key) {
    out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : settings()) k.push_back(s.key);
    return k;
  }();
  return keys;
}

std::string config_help(const std::string& key) { return find_setting(key).help; }

json config_to_json(const TrainConfig& config) {
  json j = json::object();
  for (const auto& s : settings()) j[s.key] = s.get(config);
  return j;
}

TrainConfig apply_json(TrainConfig base, const json& j) {
  if (!j.is_object()) throw ConfigError("config file: top level must be an object");
  for (const auto& [key, value] : j.items()) find_setting(key).set(base, value);
  return base;
}

void apply_text(TrainConfig& config, const std::string& key, const std::string& text) {
  const auto& s = find_setting(key);
  s.set(config, s.parse_text(text));
}

std::map<std::string, std::string> read_prefixed_environment() {
  std::map<std::string, std::string> out;
  const std::string prefix = kEnvPrefix;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string entry = *e;
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    out[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return out;
}

TrainConfig resolve_config(const ConfigSources& sources) {
  TrainConfig config;
  if (sources.config_file) {
    std::ifstream in(*sources.config_file);
    if (!in) throw IoError("cannot open config file: " + *sources.config_file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + *sources.config_file + ": " + e.what());
    }
    config = apply_json(config, j);
  }
  for (const auto& [name, text] : sources.environment) {
    bool matched = false;
    for (const auto& s : settings()) {
      if (env_name_for(s.key) == name) {
        s.set(config, s.parse_text(text));
        matched = true;
        break;
      }
    }
    if (!matched) throw ConfigError("unknown environment override '" + name + "'");
  }
  for (const auto& [key, text] : sources.flags) apply_text(config, key, text);
  config.validate();
  return config;
}

}  // namespace pbppo::cli
