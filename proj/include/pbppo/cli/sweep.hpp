#ifndef PBPPO_CLI_SWEEP_HPP_
#define PBPPO_CLI_SWEEP_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbppo/harness/config.hpp"

namespace pbppo::cli {

// "ppo-fixed:<eps>", "pb-ppo-wi-ad" or "pb-ppo-wo-ad".
struct Variant {
  std::string name;
  harness::Algorithm algorithm = harness::Algorithm::kPbPpoWiAd;
  std::optional<double> epsilon;

  harness::TrainConfig apply(harness::TrainConfig base) const;
};

Variant parse_variant(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);  // "0,1,2" or "0-4"

struct RunOutcome {
  std::string variant;
  std::uint64_t seed = 0;
  std::string dir;
  bool failed = false;
  std::string failure;
  std::size_t iterations = 0;
  double final_return = 0.0;
  std::optional<double> success_rate;
};

struct SummaryRow {
  std::string variant;
  double mean_final_return = 0.0;
  double std_final_return = 0.0;  // population std over completed runs
  std::optional<double> success_rate_mean;
  std::size_t runs = 0;
  std::size_t failed_runs = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

std::vector<SummaryRow> summarize(const std::vector<Variant>& variants,
                                  const std::vector<RunOutcome>& outcomes);

std::string summary_csv(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary(const std::string& path);

struct SweepResult {
  std::vector<RunOutcome> outcomes;  // variant-major, then seed order
  std::vector<SummaryRow> summary;
};

using RunProgress = std::function<void(const RunOutcome&)>;

// Runs every (variant, seed) into out_dir/<variant>/seed-<seed> using up to
// jobs worker threads, then writes out_dir/summary.csv and runs.csv. A failed
// run is marked in its row and the sweep continues.
SweepResult run_sweep(const harness::TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                      const std::vector<Variant>& variants, const std::string& out_dir,
                      int jobs = 1, const RunProgress& progress = {});

}  // namespace pbppo::cli

#endif  // PBPPO_CLI_SWEEP_HPP_
