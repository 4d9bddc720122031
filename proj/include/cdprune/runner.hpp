#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cdprune/metrics.hpp"
#include "cdprune/pruning.hpp"
#include "cdprune/scenario.hpp"

namespace cdprune {

struct ResultRow {
  std::string scenario;
  std::uint64_t seed = 0;
  int round = 0;
  double remaining_pct = 100.0;
  std::string split;  // "val" or "test"
  EvalReport eval;
};

/// Column order of results.csv.
const std::vector<std::string>& results_columns();

struct ResultsTable {
  std::vector<ResultRow> rows;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  /// Throws ReportError naming the file and column on schema mismatch.
  static ResultsTable read_csv(const std::filesystem::path& path);
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::ok;
  std::string error;
  std::vector<std::filesystem::path> checkpoints;
};

struct RunOutcome {
  ResultsTable table;
  std::vector<SeedOutcome> seeds;

  bool ok() const;
};

/// Loads or generates the data for one run seed, then splits and standardizes it.
Splits prepare_data(const DataConfig& data, std::uint64_t run_seed);

/// Runs every seed of the experiment. With a non-empty `out_dir`, writes
/// results.csv, run.json and seed_<s>/round_<r>.ckpt.json beneath it.
RunOutcome run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// One seed without any file output.
LtResult run_seed(const ExperimentConfig& config, std::uint64_t seed,
                  const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt);

void append_rows(ResultsTable& table, const std::string& scenario, std::uint64_t seed,
                 const LtResult& result);

const char* code_version();

}  // namespace cdprune
