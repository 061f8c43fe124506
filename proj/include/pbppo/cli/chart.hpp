#ifndef PBPPO_CLI_CHART_HPP_
#define PBPPO_CLI_CHART_HPP_

#include <string>
#include <vector>

#include "pbppo/cli/metrics_io.hpp"

namespace pbppo::cli {

// One (env_steps, eval return) curve per run.
struct RunCurve {
  std::vector<double> steps;
  std::vector<double> returns;
};

RunCurve curve_from_metrics(const std::vector<MetricsRow>& rows);

// Mean with min/max band over the runs of one configuration.
struct AggregateCurve {
  std::string label;
  std::vector<double> steps;
  std::vector<double> mean;
  std::vector<double> low;
  std::vector<double> high;
  std::size_t runs = 0;
};

// Runs on differing step grids are linearly resampled onto the coarsest
// grid (fewest points) restricted to the range all runs cover; a warning is
// appended when that happens.
AggregateCurve aggregate_runs(const std::string& label, const std::vector<RunCurve>& runs,
                              std::vector<std::string>& warnings);

// Standalone SVG; identical inputs give identical bytes.
std::string render_svg(const std::vector<AggregateCurve>& curves, const std::string& title);

struct ChartSeries {
  std::string label;
  std::vector<std::string> metrics_paths;
};

// Groups "label=path" arguments, or plain paths labelled from the run's
// manifest (algorithm and bound) or its directory name.
std::vector<ChartSeries> group_chart_inputs(const std::vector<std::string>& args);

// Returns the warnings raised while aggregating.
std::vector<std::string> emit_chart(const std::vector<ChartSeries>& series,
                                    const std::string& out_path, const std::string& title);

}  // namespace pbppo::cli

#endif  // PBPPO_CLI_CHART_HPP_
