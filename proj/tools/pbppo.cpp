#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbppo/cli/chart.hpp"
#include "pbppo/cli/config_io.hpp"
#include "pbppo/cli/manifest.hpp"
#include "pbppo/cli/metrics_io.hpp"
#include "pbppo/cli/policy_io.hpp"
#include "pbppo/cli/run_output.hpp"
#include "pbppo/cli/sweep.hpp"
#include "pbppo/envs/registry.hpp"
#include "pbppo/error.hpp"
#include "pbppo/harness/training.hpp"

namespace fs = std::filesystem;
using namespace pbppo;

namespace {

struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  bool print_config = false;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_file, "JSON config file (flat keys as below)");
  cmd->add_flag("--print-config", flags.print_config, "print the resolved config and exit");
  for (const auto& key : cli::config_keys()) {
    cmd->add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags.values[key] = v; },
        cli::config_help(key));
  }
}

harness::TrainConfig resolve(const ConfigFlags& flags) {
  cli::ConfigSources src;
  if (!flags.config_file.empty()) src.config_file = flags.config_file;
  src.environment = cli::read_prefixed_environment();
  src.flags = flags.values;
  return cli::resolve_config(src);
}

int exit_code(ErrorCategory c) { return static_cast<int>(c); }

int cmd_train(const ConfigFlags& flags, bool quiet) {
  auto config = resolve(flags);
  if (flags.print_config) {
    std::cout << cli::config_to_json(config).dump(2) << "\n";
    return 0;
  }
  if (config.output_dir.empty()) throw ConfigError("out: an output directory is required");
  cli::RunWriter writer(config.output_dir, config);
  auto art = harness::run_training(config, [&](const harness::IterationRecord& rec) {
    writer.append(rec);
    if (!quiet) {
      std::fprintf(stderr, "iter %4zu  steps %8llu  eps %.3f  return %.4f\n", rec.iteration,
                   static_cast<unsigned long long>(rec.env_steps), rec.epsilon,
                   rec.eval_return_mean);
    }
  });
  writer.finish(art);
  if (art.failed) {
    std::fprintf(stderr, "run failed after %zu iterations: %s\n", art.records.size(),
                 art.failure.c_str());
    return exit_code(art.failure_category);
  }
  const double final_return = art.records.empty() ? 0.0 : art.records.back().eval_return_mean;
  std::printf("completed %zu iterations, final eval return %.6g, output %s\n",
              art.records.size(), final_return, config.output_dir.c_str());
  return 0;
}

int cmd_sweep(ConfigFlags flags, const std::string& seeds_text,
              const std::vector<std::string>& variant_texts, int jobs, bool quiet) {
  auto out_it = flags.values.find("out");
  std::string out_dir;
  if (out_it != flags.values.end()) {
    out_dir = out_it->second;
    flags.values.erase(out_it);
  }
  auto base = resolve(flags);
  if (out_dir.empty()) out_dir = base.output_dir;
  if (out_dir.empty()) throw ConfigError("out: an output directory is required");
  std::vector<cli::Variant> variants;
  for (const auto& v : variant_texts) variants.push_back(cli::parse_variant(v));
  if (variants.empty()) {
    variants.push_back(cli::parse_variant(harness::to_string(base.algorithm) +
                                          (base.uses_bandit()
                                               ? std::string()
                                               : ":" + cli::format_number(base.fixed_epsilon))));
  }
  const auto seeds = cli::parse_seed_list(seeds_text);
  if (flags.print_config) {
    std::cout << cli::config_to_json(base).dump(2) << "\n";
    return 0;
  }
  const auto result = cli::run_sweep(base, seeds, variants, out_dir, jobs,
                                     [&](const cli::RunOutcome& o) {
                                       if (quiet) return;
                                       std::fprintf(stderr, "%s seed %llu: %s (final %.4f)\n",
                                                    o.variant.c_str(),
                                                    static_cast<unsigned long long>(o.seed),
                                                    o.failed ? "failed" : "done",
                                                    o.final_return);
                                     });
  std::cout << cli::summary_csv(result.summary);
  return 0;
}

int cmd_chart(const std::vector<std::string>& inputs, const std::string& out,
              const std::string& title) {
  const auto series = cli::group_chart_inputs(inputs);
  for (const auto& w : cli::emit_chart(series, out, title)) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
  std::printf("wrote %s (%zu series)\n", out.c_str(), series.size());
  return 0;
}

int cmd_eval(std::string policy_path, int episodes, std::uint64_t seed,
             const std::string& layout, const std::string& trace_path) {
  if (fs::is_directory(policy_path)) policy_path = (fs::path(policy_path) / "policy.json").string();
  const auto saved = cli::load_policy(policy_path);
  if (episodes < 1) throw ConfigError("episodes: must be >= 1");
  const std::string layout_path = layout.empty() ? saved.config.layout_path : layout;
  auto env = envs::make_env(saved.config.env, layout_path);
  if (env->observation_dim() != saved.policy.obs_dim()) {
    throw ConfigError("policy input size does not match environment " + saved.config.env);
  }
  Rng rng(seed);
  const auto result = harness::evaluate_policy(saved.policy, *env, episodes, rng);
  nlohmann::json out = {{"env", saved.config.env},
                        {"episodes", episodes},
                        {"seed", seed},
                        {"mean_return", result.mean_return},
                        {"returns", result.returns}};
  if (!trace_path.empty()) {
    const auto rows = harness::trace_episode(saved.policy, *env, seed);
    if (rows.empty()) throw ConfigError("trace: only pointnav environments record positions");
    std::string csv = "step,x,y\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      csv += std::to_string(i) + "," + cli::format_number(rows[i].first) + "," +
             cli::format_number(rows[i].second) + "\n";
    }
    cli::write_file(trace_path, csv);
    out["trace"] = trace_path;
  }
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_verify(const std::string& dir) {
  const auto report = cli::verify_manifest(dir);
  for (const auto& p : report.problems) std::fprintf(stderr, "%s\n", p.c_str());
  std::printf("%s: %s\n", dir.c_str(), report.ok ? "all digests match" : "verification failed");
  return report.ok ? 0 : exit_code(ErrorCategory::kIo);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-based PPO: PPO with a bandit-selected clipping bound"};
  app.set_version_flag("--version", cli::library_version());
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress output");

  ConfigFlags train_flags;
  auto* train = app.add_subcommand("train", "train one run into --out");
  add_config_flags(train, train_flags);

  ConfigFlags sweep_flags;
  std::string seeds = "0";
  std::vector<std::string> variants;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "train variants x seeds and write summary.csv");
  add_config_flags(sweep, sweep_flags);
  sweep->add_option("--seeds", seeds, "seed list, e.g. 0,1,2 or 0-4");
  sweep->add_option("--variants", variants,
                    "variants: pb-ppo-wi-ad, pb-ppo-wo-ad, ppo-fixed:<eps>")
      ->delimiter(',');
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  std::vector<std::string> chart_inputs;
  std::string chart_out = "chart.svg";
  std::string chart_title = "Evaluation return";
  auto* chart = app.add_subcommand("chart", "plot metrics.csv files as an SVG line chart");
  chart->add_option("inputs", chart_inputs, "metrics.csv files or run directories; label=path groups")
      ->required();
  chart->add_option("--out", chart_out, "output SVG path");
  chart->add_option("--title", chart_title, "chart title");

  std::string policy_path;
  int episodes = 10;
  std::uint64_t eval_seed = 0;
  std::string eval_layout;
  std::string trace_path;
  auto* eval = app.add_subcommand("eval", "evaluate a saved policy deterministically");
  eval->add_option("policy", policy_path, "policy.json or a run directory")->required();
  eval->add_option("--episodes", episodes, "episodes to run");
  eval->add_option("--seed", eval_seed, "seed for episode resets");
  eval->add_option("--layout", eval_layout, "pointnav layout file override");
  eval->add_option("--trace", trace_path, "write a pointnav (x, y) trajectory CSV");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "recompute the digests listed in a run manifest");
  verify->add_option("dir", verify_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code(ErrorCategory::kConfig);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.category());
  }

  try {
    if (*train) return cmd_train(train_flags, quiet);
    if (*sweep) return cmd_sweep(sweep_flags, seeds, variants, jobs, quiet);
    if (*chart) return cmd_chart(chart_inputs, chart_out, chart_title);
    if (*eval) return cmd_eval(policy_path, episodes, eval_seed, eval_layout, trace_path);
    if (*verify) return cmd_verify(verify_dir);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
