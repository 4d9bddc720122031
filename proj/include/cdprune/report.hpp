#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cdprune/runner.hpp"

namespace cdprune {

/// Median and min-max band of one metric across seeds at one sparsity level.
struct CurvePoint {
  double remaining_pct = 0.0;
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct Curve {
  std::string scenario;
  std::vector<CurvePoint> points;  // descending remaining_pct
};

/// Metrics rendered by `report`, in output order.
const std::vector<std::string>& report_metrics();

/// Aggregates `metric` over seeds for every scenario present in `rows`
/// restricted to `split`. Undefined values (NA) are skipped.
std::vector<Curve> aggregate(std::span<const ResultRow> rows, const std::string& metric,
                             const std::string& split = "test");

std::string render_svg(const std::vector<Curve>& curves, const std::string& metric);

/// Reads the CSVs, then writes <metric>.svg into out_dir for every metric.
/// Nothing is written if any input fails to load.
std::vector<std::filesystem::path> report(std::span<const std::filesystem::path> csvs,
                                          const std::filesystem::path& out_dir,
                                          const std::string& split = "test");

/// Line color for a scenario name.
std::string scenario_color(const std::string& scenario);

}  // namespace cdprune
