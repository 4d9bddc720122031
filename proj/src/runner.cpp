#include "cdprune/runner.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cdprune/errors.hpp"

namespace cdprune {

namespace {

std::string num(double v) { return std::isnan(v) ? "NA" : fmt::format("{}", v); }

std::string rate(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

const char* code_version() { return "cdprune " CDPRUNE_VERSION; }

const std::vector<std::string>& results_columns() {
  static const std::vector<std::string> cols{
      "scenario", "seed", "round", "remaining_pct", "split", "auc", "accuracy", "fnr",
      "fpr",      "tp",   "fp",    "tn",            "fn",    "wce", "shr"};
  return cols;
}

void ResultsTable::write_csv(std::ostream& out) const {
  const auto& cols = results_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    const auto& e = r.eval;
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario, r.seed,
                       r.round, num(r.remaining_pct), r.split, num(e.auc), num(e.accuracy),
                       rate(e.fnr), rate(e.fpr), e.tp, e.fp, e.tn, e.fn,
                       e.loss ? num(e.loss->wce) : "NA", e.loss ? num(e.loss->shr) : "NA");
  }
}

void ResultsTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FilesystemError("cannot write " + path.string());
  write_csv(out);
  if (!out) throw FilesystemError("write failed for " + path.string());
}

ResultsTable ResultsTable::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ReportError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ReportError(path.string() + ": empty results file");
  const auto header = split_line(line);
  const auto& cols = results_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i >= header.size() || header[i] != cols[i]) {
      throw ReportError(fmt::format("{}: column {} should be '{}' but is '{}'", path.string(),
                                    i + 1, cols[i], i < header.size() ? header[i] : ""));
    }
  }
  if (header.size() != cols.size()) {
    throw ReportError(fmt::format("{}: unexpected extra column '{}'", path.string(),
                                  header[cols.size()]));
  }

  ResultsTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line);
    if (cells.size() != cols.size()) {
      throw ReportError(fmt::format("{}: line {} has {} fields, expected {}", path.string(),
                                    line_no, cells.size(), cols.size()));
    }
    std::size_t col = 0;
    try {
      ResultRow r;
      r.scenario = cells[col++];
      r.seed = std::stoull(cells[col++]);
      r.round = std::stoi(cells[col++]);
      r.remaining_pct = std::stod(cells[col++]);
      r.split = cells[col++];
      auto opt = [&](const std::string& s) -> std::optional<double> {
        if (s == "NA") return std::nullopt;
        return std::stod(s);
      };
      r.eval.auc = opt(cells[col++]).value_or(std::numeric_limits<double>::quiet_NaN());
      r.eval.accuracy = std::stod(cells[col++]);
      r.eval.fnr = opt(cells[col++]);
      r.eval.fpr = opt(cells[col++]);
      r.eval.tp = std::stoull(cells[col++]);
      r.eval.fp = std::stoull(cells[col++]);
      r.eval.tn = std::stoull(cells[col++]);
      r.eval.fn = std::stoull(cells[col++]);
      r.eval.n_pos = r.eval.tp + r.eval.fn;
      r.eval.n_neg = r.eval.tn + r.eval.fp;
      const auto wce = opt(cells[col++]);
      const auto shr = opt(cells[col++]);
      if (wce && shr) r.eval.loss = LossBreakdown{*wce, *shr, *wce + *shr, {}};
      table.rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      --col;
      throw ReportError(fmt::format("{}: line {}: bad value '{}' in column '{}'", path.string(),
                                    line_no, cells[col], cols[col]));
    }
  }
  if (table.rows.empty()) throw ReportError(path.string() + ": no result rows");
  return table;
}

bool RunOutcome::ok() const {
  for (const auto& s : seeds) {
    if (s.status != RunStatus::ok) return false;
  }
  return true;
}

Splits prepare_data(const DataConfig& data, std::uint64_t run_seed) {
  Dataset full;
  if (data.source == DataConfig::Source::gaussians) {
    GaussianSpec g;
    g.n_pos = data.n_pos;
    g.n_neg = data.n_neg;
    g.dim = data.dim;
    g.separation = data.separation;
    g.spread = data.spread;
    g.seed = data_seed(run_seed);
    full = gen_gaussians(g);
  } else {
    full = load_csv(data.csv_path);
  }
  SplitSpec spec = data.split;
  spec.seed = split_seed(run_seed);
  auto splits = split(full, spec);
  standardize(splits);
  return splits;
}

LtResult run_seed(const ExperimentConfig& config, std::uint64_t seed,
                  const std::optional<std::filesystem::path>& checkpoint_dir) {
  const auto splits = prepare_data(config.data, seed);
  auto lt = config.lt_config(seed, splits.train.dim());
  lt.checkpoint_dir = checkpoint_dir;
  return lt_run(lt, splits);
}

void append_rows(ResultsTable& table, const std::string& scenario, std::uint64_t seed,
                 const LtResult& result) {
  for (const auto& rr : result.rounds) {
    for (const auto* split : {"val", "test"}) {
      ResultRow row;
      row.scenario = scenario;
      row.seed = seed;
      row.round = rr.round;
      row.remaining_pct = 100.0 * static_cast<double>(rr.surviving) / static_cast<double>(rr.total);
      row.split = split;
      row.eval = std::string_view(split) == "val" ? rr.val : rr.test;
      row.eval.check_identities();
      table.rows.push_back(std::move(row));
    }
  }
}

RunOutcome run(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  const bool write = !out_dir.empty();
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw FilesystemError("cannot create " + out_dir.string() + ": " + ec.message());
  }

  RunOutcome outcome;
  for (const auto seed : config.scenario.seeds) {
    std::optional<std::filesystem::path> ckpt_dir;
    if (write) {
      ckpt_dir = out_dir / fmt::format("seed_{}", seed);
      std::error_code ec;
      std::filesystem::create_directories(*ckpt_dir, ec);
      if (ec) throw FilesystemError("cannot create " + ckpt_dir->string());
    }
    const auto result = run_seed(config, seed, ckpt_dir);
    append_rows(outcome.table, config.scenario.name, seed, result);
    SeedOutcome so;
    so.seed = seed;
    so.status = result.status;
    so.error = result.error;
    for (const auto& rr : result.rounds) {
      if (rr.checkpoint) so.checkpoints.push_back(*rr.checkpoint);
    }
    outcome.seeds.push_back(std::move(so));
  }

  if (write) {
    outcome.table.write_csv(out_dir / "results.csv");
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& s : outcome.seeds) {
      std::vector<std::string> files;
      for (const auto& p : s.checkpoints) {
        files.push_back(std::filesystem::relative(p, out_dir).generic_string());
      }
      runs.push_back({{"seed", s.seed},
                      {"status", to_string(s.status)},
                      {"error", s.error},
                      {"checkpoints", files}});
    }
    nlohmann::json manifest = {{"code_version", code_version()},
                               {"config", to_json(config)},
                               {"results", "results.csv"},
                               {"complete", outcome.ok()},
                               {"runs", runs}};
    std::ofstream out(out_dir / "run.json");
    if (!out) throw FilesystemError("cannot write run.json");
    out << manifest.dump(2) << '\n';
  }
  return outcome;
}

}  // namespace cdprune
