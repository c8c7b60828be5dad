#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/experiment.hpp"

namespace tddr::harness {

struct AggregateRow {
  std::int64_t step = 0;
  double mean = 0.0;
  double std = 0.0;  // population std over seeds
  double smoothed = 0.0;
};

struct FinalSummary {
  int k = 0;  // evaluations averaged per seed
  std::vector<double> per_seed;
  double mean = 0.0;
  double std = 0.0;
};

struct AggregateReport {
  int window = 5;
  std::vector<std::uint64_t> seeds;
  std::vector<AggregateRow> rows;
  FinalSummary final_summary;
};

// out[i] = mean(x[max(0, i - window + 1) .. i]).
std::vector<double> trailing_mean(std::span<const double> x, int window);

// Mean and population std of a sample.
std::pair<double, double> mean_std(std::span<const double> x);

// Records must share evaluation steps (UsageError otherwise). The smoothed
// column is the trailing mean of the per-checkpoint mean.
AggregateReport aggregate(std::span<const RunRecord> records, int window, int final_k);

// Trailing-window mean of one record's evaluation returns at its last checkpoint.
double final_smoothed_return(const RunRecord& record, int window);

// seed_<seed>.csv, aggregate.csv, config.json, summary.json under dir.
void emit(const AggregateReport& report, std::span<const RunRecord> records, const ExperimentConfig& cfg,
          const std::filesystem::path& dir);

void write_seed_csv(const RunRecord& record, const std::filesystem::path& path);
void write_aggregate_csv(const AggregateReport& report, const std::filesystem::path& path);
std::vector<EvalPoint> read_seed_csv(const std::filesystem::path& path);
std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path);

// Rebuilds records from a run directory (config.json plus seed CSVs).
struct LoadedRun {
  std::vector<RunRecord> records;
  int window = 5;
  int final_k = 10;
};
LoadedRun load_run_directory(const std::filesystem::path& dir);

// Shortest round-trip decimal rendering.
std::string format_double(double v);

}  // namespace tddr::harness
