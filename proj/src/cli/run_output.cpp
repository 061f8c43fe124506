#include "pbppo/cli/run_output.hpp"

#include <filesystem>

#include "pbppo/cli/config_io.hpp"
#include "pbppo/cli/manifest.hpp"
#include "pbppo/cli/metrics_io.hpp"
#include "pbppo/cli/policy_io.hpp"
#include "pbppo/error.hpp"
#include "pbppo/nn/kernels.hpp"

namespace pbppo::cli {

namespace fs = std::filesystem;

namespace {

std::string category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kNumerical: return "numerical";
    case ErrorCategory::kEnvironment: return "environment";
  }
  return "unknown";
}

void check_stream(const std::ofstream& s, const std::string& path) {
  if (!s) throw IoError("write failed: " + path);
}

}  // namespace

RunWriter::RunWriter(std::string dir, const harness::TrainConfig& config)
    : dir_(std::move(dir)),
      wall_clock_(config.record_wall_clock),
      bandit_(config.uses_bandit()),
      started_at_(utc_timestamp()) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory " + dir_ + ": " + ec.message());
  const auto metrics_path = (fs::path(dir_) / "metrics.csv").string();
  metrics_.open(metrics_path, std::ios::binary | std::ios::trunc);
  if (!metrics_) throw IoError("cannot write " + metrics_path);
  metrics_ << metrics_header_line() << std::flush;
  check_stream(metrics_, metrics_path);
  const auto trace_path = fs::path(dir_) / "bandit_trace.csv";
  if (bandit_) {
    trace_.open(trace_path, std::ios::binary | std::ios::trunc);
    if (!trace_) throw IoError("cannot write " + trace_path.string());
  } else {
    fs::remove(trace_path, ec);
  }
}

void RunWriter::append(const harness::IterationRecord& rec) {
  total_wall_ms_ += rec.wall_ms;
  metrics_ << metrics_line(metrics_row(rec, wall_clock_)) << std::flush;
  check_stream(metrics_, dir_ + "/metrics.csv");
  if (bandit_ && rec.bandit) {
    const auto row = bandit_trace_row(rec);
    if (!trace_header_written_) {
      trace_ << bandit_trace_header_line(row.expectations.size());
      trace_header_written_ = true;
    }
    trace_ << bandit_trace_line(row) << std::flush;
    check_stream(trace_, dir_ + "/bandit_trace.csv");
  }
}

void RunWriter::finish(const harness::RunArtifacts& art) {
  if (bandit_ && !trace_header_written_ && art.bandit) {
    trace_ << bandit_trace_header_line(art.bandit->arms()) << std::flush;
  }
  metrics_.close();
  if (trace_.is_open()) trace_.close();

  std::vector<std::string> files = {"metrics.csv"};
  if (bandit_) files.push_back("bandit_trace.csv");
  if (!art.policy.policy.values().empty()) {
    save_policy((fs::path(dir_) / "policy.json").string(), art.policy, art.config);
    files.push_back("policy.json");
  }

  nlohmann::json m;
  m["format"] = "pbppo-run-manifest";
  m["version"] = library_version();
  m["started_at"] = started_at_;
  m["finished_at"] = utc_timestamp();
  m["seed"] = art.config.seed;
  m["config"] = config_to_json(art.config);
  m["iterations"] = art.records.size();
  m["env_steps"] = art.records.empty() ? 0 : art.records.back().env_steps;
  m["status"] = art.failed ? "failed" : "completed";
  if (art.failed) {
    m["failure"] = {{"category", category_name(art.failure_category)},
                    {"message", art.failure}};
  }
  if (const auto s = harness::success_rate(art.records)) m["success_rate"] = *s;
  m["timing"] = {{"total_wall_ms", total_wall_ms_},
                 {"parallel_kernels", art.config.parallel_kernels &&
                                          nn::parallel_kernels_available()},
                 {"threads", nn::max_threads()}};
  nlohmann::json notes = nlohmann::json::array();
  if (!bandit_) notes.push_back("bandit_trace.csv absent: fixed-clip runs have no bandit");
  if (!art.config.record_wall_clock) {
    notes.push_back("metrics.csv wall_ms is 0; measured time is under timing");
  }
  m["notes"] = notes;
  if (art.bandit) {
    m["bandit"] = {{"bounds", art.bandit->bounds},
                   {"expectations", art.bandit->expectations},
                   {"visits", art.bandit->arm_visits},
                   {"warnings", art.bandit->warnings}};
  }
  m["files"] = file_inventory(dir_, files);
  write_file((fs::path(dir_) / kManifestName).string(), m.dump(2) + "\n");
}

harness::RunArtifacts train_to_directory(const harness::TrainConfig& config) {
  config.validate();
  if (config.output_dir.empty()) throw ConfigError("out: an output directory is required");
  RunWriter writer(config.output_dir, config);
  auto art = harness::run_training(
      config, [&](const harness::IterationRecord& rec) { writer.append(rec); });
  writer.finish(art);
  return art;
}

}  // namespace pbppo::cli
