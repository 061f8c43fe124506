#include "pbppo/cli/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>

#include <json.hpp>

#include "pbppo/cli/manifest.hpp"
#include "pbppo/error.hpp"

namespace pbppo::cli {

namespace fs = std::filesystem;

RunCurve curve_from_metrics(const std::vector<MetricsRow>& rows) {
  RunCurve c;
  for (const auto& r : rows) {
    c.steps.push_back(static_cast<double>(r.env_steps));
    c.returns.push_back(r.eval_return_mean);
  }
  return c;
}

namespace {

double interpolate(const RunCurve& c, double x) {
  const auto it = std::lower_bound(c.steps.begin(), c.steps.end(), x);
  if (it == c.steps.end()) return c.returns.back();
  const auto i = static_cast<std::size_t>(it - c.steps.begin());
  if (*it == x || i == 0) return c.returns[i];
  const double x0 = c.steps[i - 1];
  const double x1 = c.steps[i];
  const double t = (x - x0) / (x1 - x0);
  return c.returns[i - 1] + t * (c.returns[i] - c.returns[i - 1]);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  char buf[32];
  const double a = std::fabs(v);
  if (a != 0.0 && (a >= 1e5 || a < 1e-2)) {
    std::snprintf(buf, sizeof buf, "%.2g", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.4g", v);
  }
  return buf;
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (span / step <= target) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

AggregateCurve aggregate_runs(const std::string& label, const std::vector<RunCurve>& runs,
                              std::vector<std::string>& warnings) {
  AggregateCurve out;
  out.label = label;
  out.runs = runs.size();
  if (runs.empty()) throw ConfigError("chart: series '" + label + "' has no runs");
  for (const auto& r : runs) {
    if (r.steps.empty()) throw IoError("chart: series '" + label + "' has an empty run");
  }
  bool same = true;
  for (const auto& r : runs) same = same && r.steps == runs.front().steps;

  std::vector<double> grid;
  if (same) {
    grid = runs.front().steps;
  } else {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& r : runs) {
      lo = std::max(lo, r.steps.front());
      hi = std::min(hi, r.steps.back());
    }
    const RunCurve* coarsest = &runs.front();
    for (const auto& r : runs) {
      if (r.steps.size() < coarsest->steps.size()) coarsest = &r;
    }
    for (double s : coarsest->steps) {
      if (s >= lo && s <= hi) grid.push_back(s);
    }
    if (grid.empty()) grid.push_back(hi < lo ? coarsest->steps.back() : hi);
    warnings.push_back("series '" + label + "': step grids differ; resampled " +
                       std::to_string(runs.size()) + " runs onto a common grid of " +
                       std::to_string(grid.size()) + " points");
  }
  for (double x : grid) {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : runs) {
      const double y = interpolate(r, x);
      sum += y;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    out.steps.push_back(x);
    out.mean.push_back(sum / static_cast<double>(runs.size()));
    out.low.push_back(lo);
    out.high.push_back(hi);
  }
  return out;
}

std::string render_svg(const std::vector<AggregateCurve>& curves, const std::string& title) {
  const double width = 800, height = 500;
  const double left = 80, right = 200, top = 50, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
      xmin = std::min(xmin, c.steps[i]);
      xmax = std::max(xmax, c.steps[i]);
      ymin = std::min(ymin, c.low[i]);
      ymax = std::max(ymax, c.high[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax - xmin <= 0) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin <= 0) {
    const double pad = std::max(1.0, std::fabs(ymax) * 0.1);
    ymin -= pad;
    ymax += pad;
  } else {
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
  }
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
       fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
       "\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"30\" text-anchor=\"middle\" " +
       "font-family=\"sans-serif\" font-size=\"16\">" + escape_xml(title) + "</text>\n";

  s += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t : nice_ticks(xmin, xmax, 6)) {
    s += "<line x1=\"" + fmt(px(t)) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(px(t)) +
         "\" y2=\"" + fmt(top + ph) + "\" stroke=\"#eee\"/>\n";
    s += "<text x=\"" + fmt(px(t)) + "\" y=\"" + fmt(top + ph + 16) +
         "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
  }
  for (double t : nice_ticks(ymin, ymax, 6)) {
    s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(py(t)) + "\" x2=\"" + fmt(left + pw) +
         "\" y2=\"" + fmt(py(t)) + "\" stroke=\"#eee\"/>\n";
    s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(py(t) + 4) +
         "\" text-anchor=\"end\">" + tick_label(t) + "</text>\n";
  }
  s += "</g>\n";
  s += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) +
       "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  s += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(height - 15) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       "environment steps</text>\n";
  s += "<text x=\"20\" y=\"" + fmt(top + ph / 2) + "\" text-anchor=\"middle\" " +
       "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 " +
       fmt(top + ph / 2) + ")\">evaluation return</text>\n";

  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const std::string color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    std::string band;
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
      band += fmt(px(c.steps[i])) + "," + fmt(py(c.high[i])) + " ";
    }
    for (std::size_t i = c.steps.size(); i-- > 0;) {
      band += fmt(px(c.steps[i])) + "," + fmt(py(c.low[i])) + " ";
    }
    if (!band.empty()) band.pop_back();
    s += "<polygon class=\"band\" points=\"" + band + "\" fill=\"" + color +
         "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    std::string line;
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
      if (i) line += ' ';
      line += fmt(px(c.steps[i])) + "," + fmt(py(c.mean[i]));
    }
    s += "<polyline class=\"mean\" points=\"" + line + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(k);
    s += "<line x1=\"" + fmt(left + pw + 15) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
         fmt(left + pw + 40) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fmt(left + pw + 46) + "\" y=\"" + fmt(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + escape_xml(c.label) + " (n=" +
         std::to_string(c.runs) + ")</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::vector<ChartSeries> group_chart_inputs(const std::vector<std::string>& args) {
  std::vector<ChartSeries> out;
  std::map<std::string, std::size_t> index;
  for (const auto& arg : args) {
    std::string label;
    std::string path = arg;
    const auto eq = arg.find('=');
    if (eq != std::string::npos && eq > 0) {
      label = arg.substr(0, eq);
      path = arg.substr(eq + 1);
    }
    if (fs::is_directory(path)) path = (fs::path(path) / "metrics.csv").string();
    if (label.empty()) {
      const auto manifest = fs::path(path).parent_path() / kManifestName;
      if (fs::exists(manifest)) {
        try {
          const auto m = nlohmann::json::parse(read_file(manifest.string()));
          const auto& cfg = m.at("config");
          label = cfg.at("algo").get<std::string>();
          if (label == "ppo-fixed") label += ":" + tick_label(cfg.at("clip").get<double>());
        } catch (const nlohmann::json::exception&) {
          label.clear();
        }
      }
      if (label.empty()) {
        const auto parent = fs::path(path).parent_path().filename().string();
        label = parent.empty() ? fs::path(path).stem().string() : parent;
      }
    }
    auto [it, inserted] = index.try_emplace(label, out.size());
    if (inserted) out.push_back({label, {}});
    out[it->second].metrics_paths.push_back(path);
  }
  return out;
}

std::vector<std::string> emit_chart(const std::vector<ChartSeries>& series,
                                    const std::string& out_path, const std::string& title) {
  if (series.empty()) throw ConfigError("chart: at least one metrics file is required");
  std::vector<std::string> warnings;
  std::vector<AggregateCurve> curves;
  for (const auto& s : series) {
    std::vector<RunCurve> runs;
    for (const auto& p : s.metrics_paths) runs.push_back(curve_from_metrics(read_metrics(p)));
    curves.push_back(aggregate_runs(s.label, runs, warnings));
  }
  write_file(out_path, render_svg(curves, title));
  return warnings;
}

}  // namespace pbppo::cli
