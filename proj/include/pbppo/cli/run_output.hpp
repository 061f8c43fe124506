#ifndef PBPPO_CLI_RUN_OUTPUT_HPP_
#define PBPPO_CLI_RUN_OUTPUT_HPP_

#include <fstream>
#include <optional>
#include <string>

#include "pbppo/harness/training.hpp"

namespace pbppo::cli {

// Streams metrics.csv and, for bandit runs, bandit_trace.csv as records
// arrive, flushing after every iteration. finish() writes policy.json and
// manifest.json.
class RunWriter {
 public:
  RunWriter(std::string dir, const harness::TrainConfig& config);

  void append(const harness::IterationRecord& rec);
  void finish(const harness::RunArtifacts& artifacts);

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  bool wall_clock_;
  bool bandit_;
  std::ofstream metrics_;
  std::ofstream trace_;
  bool trace_header_written_ = false;
  std::string started_at_;
  double total_wall_ms_ = 0.0;
};

// Trains config into config.output_dir (created if needed) and returns the
// artifacts. Run failures are recorded in the manifest, not thrown.
harness::RunArtifacts train_to_directory(const harness::TrainConfig& config);

}  // namespace pbppo::cli

#endif  // PBPPO_CLI_RUN_OUTPUT_HPP_
