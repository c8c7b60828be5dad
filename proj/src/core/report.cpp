#include "core/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "json.hpp"

namespace tddr::harness {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

std::vector<double> trailing_mean(std::span<const double> x, int window) {
  if (window < 1) throw UsageError("trailing_mean: window must be >= 1");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t first = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = first; k <= i; ++k) sum += x[k];
    out[i] = sum / static_cast<double>(i - first + 1);
  }
  return out;
}

std::pair<double, double> mean_std(std::span<const double> x) {
  if (x.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(x.size()))};
}

AggregateReport aggregate(std::span<const RunRecord> records, int window, int final_k) {
  if (window < 1) throw UsageError("aggregate: window must be >= 1");
  if (final_k < 1) throw UsageError("aggregate: final_k must be >= 1");
  AggregateReport report;
  report.window = window;
  report.final_summary.k = final_k;
  if (records.empty()) return report;

  const std::vector<EvalPoint>& ref = records.front().evaluations;
  for (const RunRecord& r : records) {
    report.seeds.push_back(r.seed);
    bool same = r.evaluations.size() == ref.size();
    for (std::size_t i = 0; same && i < ref.size(); ++i) same = r.evaluations[i].step == ref[i].step;
    if (!same) {
      throw UsageError("aggregate: seed " + std::to_string(r.seed) + " has different checkpoints than seed " +
                       std::to_string(records.front().seed));
    }
  }

  std::vector<double> column(records.size());
  std::vector<double> means;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t s = 0; s < records.size(); ++s) column[s] = records[s].evaluations[i].mean_return;
    const auto [m, sd] = mean_std(column);
    report.rows.push_back({ref[i].step, m, sd, 0.0});
    means.push_back(m);
  }
  const std::vector<double> smoothed = trailing_mean(means, window);
  for (std::size_t i = 0; i < smoothed.size(); ++i) report.rows[i].smoothed = smoothed[i];

  for (const RunRecord& r : records) {
    const std::size_t n = r.evaluations.size();
    const std::size_t first = n > static_cast<std::size_t>(final_k) ? n - final_k : 0;
    double sum = 0.0;
    for (std::size_t i = first; i < n; ++i) sum += r.evaluations[i].mean_return;
    report.final_summary.per_seed.push_back(n ? sum / static_cast<double>(n - first) : 0.0);
  }
  const auto [fm, fsd] = mean_std(report.final_summary.per_seed);
  report.final_summary.mean = fm;
  report.final_summary.std = fsd;
  return report;
}

double final_smoothed_return(const RunRecord& record, int window) {
  if (record.evaluations.empty()) throw UsageError("final_smoothed_return: record has no evaluations");
  std::vector<double> returns;
  for (const EvalPoint& p : record.evaluations) returns.push_back(p.mean_return);
  return trailing_mean(returns, window).back();
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ConfigError(path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

template <typename T>
T parse_number(const std::string& s, const std::filesystem::path& path) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(path.string() + ": bad number '" + s + "'");
  }
  return v;
}

double parse_value(const std::string& s, const std::filesystem::path& path) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return parse_number<double>(s, path);
}

}  // namespace

void write_seed_csv(const RunRecord& record, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "step,return\n";
  for (const EvalPoint& p : record.evaluations) out << p.step << ',' << format_double(p.mean_return) << '\n';
  finish(out, path);
}

void write_aggregate_csv(const AggregateReport& report, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "step,mean,std,smoothed\n";
  for (const AggregateRow& r : report.rows) {
    out << r.step << ',' << format_double(r.mean) << ',' << format_double(r.std) << ','
        << format_double(r.smoothed) << '\n';
  }
  finish(out, path);
}

std::vector<EvalPoint> read_seed_csv(const std::filesystem::path& path) {
  std::vector<EvalPoint> out;
  for (const auto& cells : read_csv(path, "step,return")) {
    if (cells.size() != 2) throw ConfigError(path.string() + ": expected 2 columns");
    out.push_back({parse_number<std::int64_t>(cells[0], path), parse_value(cells[1], path)});
  }
  return out;
}

std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path) {
  std::vector<AggregateRow> out;
  for (const auto& cells : read_csv(path, "step,mean,std,smoothed")) {
    if (cells.size() != 4) throw ConfigError(path.string() + ": expected 4 columns");
    out.push_back({parse_number<std::int64_t>(cells[0], path), parse_value(cells[1], path),
                   parse_value(cells[2], path), parse_value(cells[3], path)});
  }
  return out;
}

void emit(const AggregateReport& report, std::span<const RunRecord> records, const ExperimentConfig& cfg,
          const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  for (const RunRecord& r : records) write_seed_csv(r, dir / ("seed_" + std::to_string(r.seed) + ".csv"));
  write_aggregate_csv(report, dir / "aggregate.csv");

  nlohmann::ordered_json config;
  config["config_hash"] = hash_hex(config_hash(cfg));
  nlohmann::ordered_json options;
  for (const auto& [k, v] : canonical_options(cfg)) options[k] = v;
  config["options"] = options;
  config["seeds"] = cfg.seeds;
  {
    const auto path = dir / "config.json";
    auto out = open_for_write(path);
    out << config.dump(2) << '\n';
    finish(out, path);
  }

  nlohmann::ordered_json summary;
  summary["config_hash"] = hash_hex(config_hash(cfg));
  summary["window"] = report.window;
  summary["final_k"] = report.final_summary.k;
  summary["final_mean"] = report.final_summary.mean;
  summary["final_std"] = report.final_summary.std;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const RunRecord& r : records) {
    nlohmann::ordered_json run;
    run["seed"] = r.seed;
    run["config_hash"] = hash_hex(r.config_hash);
    run["evaluations"] = r.evaluations.size();
    run["env_steps"] = r.env_steps;
    run["gradient_steps"] = r.gradient_steps;
    run["final_smoothed"] = r.evaluations.empty() ? 0.0 : final_smoothed_return(r, report.window);
    run["aborted"] = r.aborted;
    run["diagnostic"] = r.diagnostic;
    runs.push_back(run);
  }
  summary["runs"] = runs;
  {
    const auto path = dir / "summary.json";
    auto out = open_for_write(path);
    out << summary.dump(2) << '\n';
    finish(out, path);
  }
}

LoadedRun load_run_directory(const std::filesystem::path& dir) {
  const auto config_path = dir / "config.json";
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + config_path.string());
  nlohmann::json config;
  try {
    in >> config;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(config_path.string() + ": " + e.what());
  }

  LoadedRun run;
  try {
    const auto& options = config.at("options");
    run.window = std::stoi(options.at("smoothing_window").get<std::string>());
    run.final_k = std::stoi(options.at("final_evaluations").get<std::string>());
    const std::uint64_t hash = std::stoull(config.at("config_hash").get<std::string>(), nullptr, 16);
    for (std::uint64_t seed : config.at("seeds").get<std::vector<std::uint64_t>>()) {
      RunRecord r;
      r.seed = seed;
      r.config_hash = hash;
      r.evaluations = read_seed_csv(dir / ("seed_" + std::to_string(seed) + ".csv"));
      run.records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(config_path.string() + ": " + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigError(config_path.string() + ": malformed option value");
  }
  return run;
}

}  // namespace tddr::harness
