#include "cdprune/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "cdprune/errors.hpp"

namespace cdprune {

namespace {

std::optional<double> metric_value(const ResultRow& row, const std::string& metric) {
  const auto& e = row.eval;
  if (metric == "auc") return std::isnan(e.auc) ? std::nullopt : std::optional(e.auc);
  if (metric == "accuracy") return e.accuracy;
  if (metric == "fnr") return e.fnr;
  if (metric == "fpr") return e.fpr;
  throw ReportError("unknown metric '" + metric + "'");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string metric_label(const std::string& metric) {
  if (metric == "auc") return "AUC-ROC";
  if (metric == "accuracy") return "Accuracy";
  if (metric == "fnr") return "FNR";
  return "FPR";
}

// Scenario order for legends: presets first, then others alphabetically.
int scenario_rank(const std::string& name) {
  static const std::vector<std::string> order{"red", "blue", "black", "green"};
  const auto it = std::find(order.begin(), order.end(), name);
  return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

}  // namespace

const std::vector<std::string>& report_metrics() {
  static const std::vector<std::string> metrics{"auc", "accuracy", "fnr", "fpr"};
  return metrics;
}

std::string scenario_color(const std::string& scenario) {
  if (scenario == "red") return "#d62728";
  if (scenario == "blue") return "#1f4fd6";
  if (scenario == "black") return "#000000";
  if (scenario == "green") return "#228b22";
  return "#8c6d9e";
}

std::vector<Curve> aggregate(std::span<const ResultRow> rows, const std::string& metric,
                             const std::string& split) {
  // scenario -> remaining_pct -> values across seeds
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const auto& row : rows) {
    if (row.split != split) continue;
    const auto v = metric_value(row, metric);
    auto& bucket = groups[row.scenario][row.remaining_pct];
    if (v) bucket.push_back(*v);
  }
  std::vector<Curve> curves;
  for (auto& [name, levels] : groups) {
    Curve c;
    c.scenario = name;
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
      if (it->second.empty()) continue;
      const auto [lo, hi] = std::minmax_element(it->second.begin(), it->second.end());
      c.points.push_back({it->first, median(it->second), *lo, *hi});
    }
    curves.push_back(std::move(c));
  }
  std::stable_sort(curves.begin(), curves.end(), [](const Curve& a, const Curve& b) {
    return scenario_rank(a.scenario) < scenario_rank(b.scenario);
  });
  return curves;
}

std::string render_svg(const std::vector<Curve>& curves, const std::string& metric) {
  constexpr double width = 640, height = 420;
  constexpr double left = 70, right = 150, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_max = 100.0, x_min = 100.0;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      x_max = std::max(x_max, p.remaining_pct);
      x_min = std::min(x_min, p.remaining_pct);
    }
  }
  if (x_min >= x_max) x_min = x_max / 2.0;
  const double lx_max = std::log10(x_max);
  const double lx_min = std::log10(x_min);
  // Remaining weights shrink to the right.
  const auto sx = [&](double pct) {
    return left + (lx_max - std::log10(pct)) / (lx_max - lx_min) * plot_w;
  };
  const auto sy = [&](double v) { return top + (1.0 - std::clamp(v, 0.0, 1.0)) * plot_h; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height, width, height);
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
  svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{} vs remaining weights</text>\n",
                     left + plot_w / 2, metric_label(metric));

  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n",
                       left, sy(v), left + plot_w, sy(v));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.1f}</text>\n",
                       left - 6, sy(v) + 4, v);
  }
  for (double pct = x_max; pct >= x_min * 0.999; pct /= 2.0) {
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#eeeeee\"/>\n",
                       sx(pct), top, sx(pct), top + plot_h);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.3g}</text>\n", sx(pct),
                       top + plot_h + 18, pct);
  }
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>\n",
                     left, top, plot_w, plot_h);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">remaining weights (%)</text>\n",
                     left + plot_w / 2, height - 15);
  svg += fmt::format("<text x=\"18\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">{}</text>\n",
                     top + plot_h / 2, top + plot_h / 2, metric_label(metric));

  double legend_y = top + 10;
  for (const auto& c : curves) {
    if (c.points.empty()) continue;
    const auto color = scenario_color(c.scenario);
    std::string band, line;
    for (const auto& p : c.points) band += fmt::format("{:.2f},{:.2f} ", sx(p.remaining_pct), sy(p.hi));
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it) {
      band += fmt::format("{:.2f},{:.2f} ", sx(it->remaining_pct), sy(it->lo));
    }
    for (const auto& p : c.points) line += fmt::format("{:.2f},{:.2f} ", sx(p.remaining_pct), sy(p.median));
    band.pop_back();
    line.pop_back();
    svg += fmt::format("<g class=\"scenario\" data-scenario=\"{}\">\n", c.scenario);
    svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n", band, color);
    svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", line, color);
    for (const auto& p : c.points) {
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", sx(p.remaining_pct),
                         sy(p.median), color);
    }
    svg += "</g>\n";
    const double lx = left + plot_w + 15;
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       lx, legend_y, lx + 24, legend_y, color);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", lx + 30, legend_y + 4, c.scenario);
    legend_y += 20;
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> report(std::span<const std::filesystem::path> csvs,
                                          const std::filesystem::path& out_dir,
                                          const std::string& split) {
  if (csvs.empty()) throw ReportError("no results files given");
  std::vector<ResultRow> rows;
  for (const auto& path : csvs) {
    auto table = ResultsTable::read_csv(path);
    rows.insert(rows.end(), std::make_move_iterator(table.rows.begin()),
                std::make_move_iterator(table.rows.end()));
  }
  std::vector<std::pair<std::filesystem::path, std::string>> outputs;
  for (const auto& metric : report_metrics()) {
    const auto curves = aggregate(rows, metric, split);
    if (curves.empty()) throw ReportError("no '" + split + "' rows to plot");
    outputs.emplace_back(out_dir / (metric + ".svg"), render_svg(curves, metric));
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw FilesystemError("cannot create " + out_dir.string());
  std::vector<std::filesystem::path> written;
  for (const auto& [path, svg] : outputs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FilesystemError("cannot write " + path.string());
    out << svg;
    written.push_back(path);
  }
  return written;
}

}  // namespace cdprune
