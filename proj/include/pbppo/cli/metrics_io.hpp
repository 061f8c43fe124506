#ifndef PBPPO_CLI_METRICS_IO_HPP_
#define PBPPO_CLI_METRICS_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pbppo/harness/training.hpp"

namespace pbppo::cli {

// %.17g, which reloads to the identical double.
std::string format_number(double v);
double parse_number(const std::string& text, const std::string& where);

// Minimal RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);

struct MetricsRow {
  std::uint64_t iteration = 0;
  std::uint64_t env_steps = 0;
  double epsilon = 0.0;
  double eval_return_mean = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double clip_fraction = 0.0;
  double wall_ms = 0.0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

const std::vector<std::string>& metrics_columns();
// wall_ms is written as 0 unless wall_clock is set, so that reruns produce
// identical files.
MetricsRow metrics_row(const harness::IterationRecord& rec, bool wall_clock);
std::string metrics_header_line();
std::string metrics_line(const MetricsRow& row);

void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics(const std::string& path);

struct BanditTraceRow {
  std::uint64_t iteration = 0;
  std::vector<double> expectations;
  std::vector<std::uint64_t> visits;
  std::vector<double> ucb;

  friend bool operator==(const BanditTraceRow&, const BanditTraceRow&) = default;
};

BanditTraceRow bandit_trace_row(const harness::IterationRecord& rec);
std::string bandit_trace_header_line(std::size_t arms);
std::string bandit_trace_line(const BanditTraceRow& row);
std::vector<BanditTraceRow> read_bandit_trace(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace pbppo::cli

#endif  // PBPPO_CLI_METRICS_IO_HPP_
