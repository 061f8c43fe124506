#include "pbppo/cli/metrics_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pbppo/error.hpp"

namespace pbppo::cli {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text, const std::string& where) {
  if (text.empty()) throw IoError(where + ": empty numeric field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw IoError(where + ": '" + text + "' is not a number");
  }
  return v;
}

namespace {

std::uint64_t parse_count(const std::string& text, const std::string& where) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw IoError(where + ": '" + text + "' is not a count");
  }
  return std::stoull(text);
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      row_has_content = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      row_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (row_has_content || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      row_has_content = false;
    } else {
      field += c;
      row_has_content = true;
    }
  }
  if (quoted) throw IoError("csv: unterminated quoted field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "iteration",   "env_steps",  "epsilon",       "eval_return_mean",
      "policy_loss", "value_loss", "clip_fraction", "wall_ms"};
  return cols;
}

MetricsRow metrics_row(const harness::IterationRecord& rec, bool wall_clock) {
  MetricsRow row;
  row.iteration = rec.iteration;
  row.env_steps = rec.env_steps;
  row.epsilon = rec.epsilon;
  row.eval_return_mean = rec.eval_return_mean;
  row.policy_loss = rec.policy_loss;
  row.value_loss = rec.value_loss;
  row.clip_fraction = rec.clip_fraction;
  row.wall_ms = wall_clock ? rec.wall_ms : 0.0;
  return row;
}

std::string metrics_header_line() { return join(metrics_columns()) + "\n"; }

std::string metrics_line(const MetricsRow& row) {
  return join({std::to_string(row.iteration), std::to_string(row.env_steps),
               format_number(row.epsilon), format_number(row.eval_return_mean),
               format_number(row.policy_loss), format_number(row.value_loss),
               format_number(row.clip_fraction), format_number(row.wall_ms)}) +
         "\n";
}

void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::string out = metrics_header_line();
  for (const auto& r : rows) out += metrics_line(r);
  write_file(path, out);
}

std::vector<MetricsRow> read_metrics(const std::string& path) {
  const auto rows = parse_csv(read_file(path));
  if (rows.empty() || rows.front() != metrics_columns()) {
    throw IoError(path + ": missing or unexpected metrics header");
  }
  std::vector<MetricsRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::string where = path + ":" + std::to_string(i + 1);
    if (f.size() != metrics_columns().size()) throw IoError(where + ": wrong column count");
    MetricsRow r;
    r.iteration = parse_count(f[0], where);
    r.env_steps = parse_count(f[1], where);
    r.epsilon = parse_number(f[2], where);
    r.eval_return_mean = parse_number(f[3], where);
    r.policy_loss = parse_number(f[4], where);
    r.value_loss = parse_number(f[5], where);
    r.clip_fraction = parse_number(f[6], where);
    r.wall_ms = parse_number(f[7], where);
    out.push_back(r);
  }
  return out;
}

BanditTraceRow bandit_trace_row(const harness::IterationRecord& rec) {
  if (!rec.bandit) throw ConfigError("bandit trace requested for a fixed-clip record");
  BanditTraceRow row;
  row.iteration = rec.iteration;
  row.expectations = rec.bandit->expectations;
  row.visits = rec.bandit->visits;
  row.ucb = rec.bandit->ucb.combined;
  return row;
}

std::string bandit_trace_header_line(std::size_t arms) {
  std::vector<std::string> cols = {"iteration"};
  for (std::size_t i = 0; i < arms; ++i) {
    const std::string a = "arm" + std::to_string(i);
    cols.push_back(a + "_expectation");
    cols.push_back(a + "_visits");
    cols.push_back(a + "_ucb");
  }
  return join(cols) + "\n";
}

std::string bandit_trace_line(const BanditTraceRow& row) {
  std::vector<std::string> f = {std::to_string(row.iteration)};
  for (std::size_t i = 0; i < row.expectations.size(); ++i) {
    f.push_back(format_number(row.expectations[i]));
    f.push_back(std::to_string(row.visits[i]));
    f.push_back(format_number(row.ucb[i]));
  }
  return join(f) + "\n";
}

std::vector<BanditTraceRow> read_bandit_trace(const std::string& path) {
  const auto rows = parse_csv(read_file(path));
  if (rows.empty() || rows.front().empty() || rows.front()[0] != "iteration" ||
      (rows.front().size() - 1) % 3 != 0) {
    throw IoError(path + ": missing or unexpected bandit trace header");
  }
  const std::size_t arms = (rows.front().size() - 1) / 3;
  if (parse_csv(bandit_trace_header_line(arms)).front() != rows.front()) {
    throw IoError(path + ": unexpected bandit trace header");
  }
  std::vector<BanditTraceRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::string where = path + ":" + std::to_string(i + 1);
    if (f.size() != 1 + 3 * arms) throw IoError(where + ": wrong column count");
    BanditTraceRow r;
    r.iteration = parse_count(f[0], where);
    for (std::size_t a = 0; a < arms; ++a) {
      r.expectations.push_back(parse_number(f[1 + 3 * a], where));
      r.visits.push_back(parse_count(f[2 + 3 * a], where));
      r.ucb.push_back(parse_number(f[3 + 3 * a], where));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace pbppo::cli
