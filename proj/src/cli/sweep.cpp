#include "pbppo/cli/sweep.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include "pbppo/cli/metrics_io.hpp"
#include "pbppo/cli/run_output.hpp"
#include "pbppo/error.hpp"

namespace pbppo::cli {

namespace fs = std::filesystem;

harness::TrainConfig Variant::apply(harness::TrainConfig base) const {
  base.algorithm = algorithm;
  if (epsilon) base.fixed_epsilon = *epsilon;
  return base;
}

Variant parse_variant(const std::string& text) {
  Variant v;
  v.name = text;
  const auto colon = text.find(':');
  const std::string algo = text.substr(0, colon);
  v.algorithm = harness::parse_algorithm(algo);
  if (v.algorithm == harness::Algorithm::kPpoFixed) {
    if (colon == std::string::npos) {
      throw ConfigError("variant: '" + text + "' needs a bound, e.g. ppo-fixed:0.2");
    }
    const std::string eps = text.substr(colon + 1);
    char* end = nullptr;
    const double e = std::strtod(eps.c_str(), &end);
    if (eps.empty() || end != eps.c_str() + eps.size()) {
      throw ConfigError("variant: '" + eps + "' is not a number");
    }
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("variant: epsilon must lie in (0,1)");
    v.epsilon = e;
  } else if (colon != std::string::npos) {
    throw ConfigError("variant: '" + text + "' takes no bound");
  }
  return v;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  auto parse_one = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("seeds: '" + s + "' is not a non-negative integer");
    }
    return std::stoull(s);
  };
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto dash = item.find('-');
    if (dash != std::string::npos) {
      const auto lo = parse_one(item.substr(0, dash));
      const auto hi = parse_one(item.substr(dash + 1));
      if (hi < lo) throw ConfigError("seeds: empty range '" + item + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_one(item));
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  return seeds;
}

std::vector<SummaryRow> summarize(const std::vector<Variant>& variants,
                                  const std::vector<RunOutcome>& outcomes) {
  std::vector<SummaryRow> rows;
  for (const auto& v : variants) {
    SummaryRow row;
    row.variant = v.name;
    std::vector<double> finals;
    std::vector<double> rates;
    for (const auto& o : outcomes) {
      if (o.variant != v.name) continue;
      ++row.runs;
      if (o.failed) {
        ++row.failed_runs;
        continue;
      }
      finals.push_back(o.final_return);
      if (o.success_rate) rates.push_back(*o.success_rate);
    }
    if (!finals.empty()) {
      double sum = 0.0;
      for (double f : finals) sum += f;
      row.mean_final_return = sum / static_cast<double>(finals.size());
      double sq = 0.0;
      for (double f : finals) sq += (f - row.mean_final_return) * (f - row.mean_final_return);
      row.std_final_return = std::sqrt(sq / static_cast<double>(finals.size()));
    } else {
      row.mean_final_return = std::nan("");
      row.std_final_return = std::nan("");
    }
    if (!rates.empty()) {
      double s = 0.0;
      for (double r : rates) s += r;
      row.success_rate_mean = s / static_cast<double>(rates.size());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "variant,mean_final_return,std_final_return,success_rate_mean,runs,failed_runs\n";
  for (const auto& r : rows) {
    out += csv_escape(r.variant) + "," + format_number(r.mean_final_return) + "," +
           format_number(r.std_final_return) + "," +
           (r.success_rate_mean ? format_number(*r.success_rate_mean) : std::string()) + "," +
           std::to_string(r.runs) + "," + std::to_string(r.failed_runs) + "\n";
  }
  return out;
}

std::vector<SummaryRow> read_summary(const std::string& path) {
  const auto rows = parse_csv(read_file(path));
  const std::vector<std::string> header = {"variant",           "mean_final_return",
                                           "std_final_return",  "success_rate_mean",
                                           "runs",              "failed_runs"};
  if (rows.empty() || rows.front() != header) throw IoError(path + ": unexpected header");
  std::vector<SummaryRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::string where = path + ":" + std::to_string(i + 1);
    if (f.size() != header.size()) throw IoError(where + ": wrong column count");
    SummaryRow r;
    r.variant = f[0];
    r.mean_final_return = parse_number(f[1], where);
    r.std_final_return = parse_number(f[2], where);
    if (!f[3].empty()) r.success_rate_mean = parse_number(f[3], where);
    r.runs = static_cast<std::size_t>(parse_number(f[4], where));
    r.failed_runs = static_cast<std::size_t>(parse_number(f[5], where));
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string variant_dir_name(const std::string& name) {
  std::string out;
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')
                                 ? c
                                 : '_';
  return out;
}

}  // namespace

SweepResult run_sweep(const harness::TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                      const std::vector<Variant>& variants, const std::string& out_dir,
                      int jobs, const RunProgress& progress) {
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (variants.empty()) throw ConfigError("variants: at least one variant is required");
  if (jobs < 1) throw ConfigError("jobs: must be >= 1");

  struct Task {
    harness::TrainConfig config;
    RunOutcome outcome;
  };
  std::vector<Task> tasks;
  for (const auto& v : variants) {
    for (auto seed : seeds) {
      Task t;
      t.config = v.apply(base);
      t.config.seed = seed;
      t.config.output_dir =
          (fs::path(out_dir) / variant_dir_name(v.name) / ("seed-" + std::to_string(seed)))
              .string();
      t.config.validate();
      t.outcome.variant = v.name;
      t.outcome.seed = seed;
      t.outcome.dir = t.config.output_dir;
      tasks.push_back(std::move(t));
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      auto& t = tasks[i];
      try {
        const auto art = train_to_directory(t.config);
        t.outcome.iterations = art.records.size();
        t.outcome.failed = art.failed || art.records.empty();
        t.outcome.failure = art.failed ? art.failure : std::string();
        if (!art.records.empty()) t.outcome.final_return = art.records.back().eval_return_mean;
        t.outcome.success_rate = harness::success_rate(art.records);
      } catch (const std::exception& e) {
        t.outcome.failed = true;
        t.outcome.failure = e.what();
      }
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(t.outcome);
      }
    }
  };
  const int n = std::min<int>(jobs, static_cast<int>(tasks.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  for (auto& t : tasks) result.outcomes.push_back(std::move(t.outcome));
  result.summary = summarize(variants, result.outcomes);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  write_file((fs::path(out_dir) / "summary.csv").string(), summary_csv(result.summary));
  std::string runs = "variant,seed,status,iterations,final_return,success_rate,dir,failure\n";
  for (const auto& o : result.outcomes) {
    runs += csv_escape(o.variant) + "," + std::to_string(o.seed) + "," +
            (o.failed ? "failed" : "completed") + "," + std::to_string(o.iterations) + "," +
            format_number(o.final_return) + "," +
            (o.success_rate ? format_number(*o.success_rate) : std::string()) + "," +
            csv_escape(o.dir) + "," + csv_escape(o.failure) + "\n";
  }
  write_file((fs::path(out_dir) / "runs.csv").string(), runs);
  return result;
}

}  // namespace pbppo::cli
