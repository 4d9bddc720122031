#include "cdprune/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

#include "cdprune/errors.hpp"
#include "cdprune/rng.hpp"

namespace cdprune {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

void Dataset::recount() {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw ContractError("dataset rows and labels disagree");
  }
  n_pos = 0;
  n_neg = 0;
  for (int label : y) {
    if (label == kPositive) {
      ++n_pos;
    } else if (label == kNegative) {
      ++n_neg;
    } else {
      throw SchemaError("labels must be 0 or 1");
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    out.y.push_back(y[rows[i]]);
  }
  out.feature_means = feature_means;
  out.feature_stds = feature_stds;
  out.provenance = provenance;
  out.recount();
  return out;
}

Dataset gen_gaussians(const GaussianSpec& spec) {
  if (spec.n_pos < 1 || spec.n_neg < 1) throw DomainError("class counts must be >= 1");
  if (spec.dim < 2) throw DomainError("dimension must be >= 2");
  if (!(spec.separation >= 0.0)) throw DomainError("separation must be >= 0");
  if (!(spec.spread > 0.0)) throw DomainError("spread must be > 0");

  Rng rng(spec.seed);
  const std::size_t n = spec.n_pos + spec.n_neg;
  Labels labels(n, kNegative);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(spec.n_pos), kPositive);
  rng.shuffle(labels);

  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < spec.dim; ++j) {
      double v = spec.spread * rng.normal();
      if (j == 0 && labels[i] == kPositive) v += spec.separation;
      ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  ds.y = std::move(labels);
  ds.provenance = fmt::format("gaussians(n_pos={}, n_neg={}, dim={}, separation={}, spread={}, seed={})",
                              spec.n_pos, spec.n_neg, spec.dim, spec.separation, spec.spread,
                              spec.seed);
  ds.recount();
  return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FilesystemError("cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  Labels labels;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    std::vector<double> values(cells.size());
    std::size_t bad_col = cells.size();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], values[c])) {
        bad_col = c;
        break;
      }
    }
    if (first_content) {
      first_content = false;
      if (bad_col != cells.size()) continue;  // header
    }
    if (bad_col != cells.size()) {
      throw ParseError(fmt::format("{}: row {}, column {}: non-numeric value '{}'", path.string(),
                                   line_no, bad_col + 1, cells[bad_col]));
    }
    if (cells.size() < 2) {
      throw SchemaError(fmt::format("{}: row {}: need at least one feature and a label",
                                    path.string(), line_no));
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw SchemaError(fmt::format("{}: row {}: expected {} columns, found {}", path.string(),
                                    line_no, width, cells.size()));
    }
    const double label = values.back();
    if (label != 0.0 && label != 1.0) {
      throw SchemaError(fmt::format("{}: row {}: label must be 0 or 1, got '{}'", path.string(),
                                    line_no, cells.back()));
    }
    labels.push_back(label == 1.0 ? kPositive : kNegative);
    values.pop_back();
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw SchemaError(path.string() + ": no data rows");

  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < width; ++j) {
      ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  ds.y = std::move(labels);
  ds.provenance = fmt::format("csv:{} ({} rows)", path.string(), rows.size());
  ds.recount();
  return ds;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FilesystemError("cannot write " + path.string());
  for (std::size_t j = 0; j < ds.dim(); ++j) out << 'f' << (j + 1) << ',';
  out << "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      out << fmt::format("{}", ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
          << ',';
    }
    out << ds.y[i] << '\n';
  }
  if (!out) throw FilesystemError("write failed for " + path.string());
}

void SplitSpec::validate() const {
  for (double f : {train, val, test}) {
    if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("split fractions must be in [0, 1]");
  }
  if (std::abs(train + val + test - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  if (stratified && (train <= 0.0 || val <= 0.0 || test <= 0.0)) {
    throw ValidationError("stratified splits need every fraction > 0");
  }
}

namespace {

// Sizes (train, val, test) for `n` items; test takes the remainder.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec) {
  const auto round_to = [n](double f) {
    return std::min(n, static_cast<std::size_t>(std::llround(f * static_cast<double>(n))));
  };
  const std::size_t tr = round_to(spec.train);
  const std::size_t va = std::min(n - tr, round_to(spec.val));
  return {tr, va, n - tr - va};
}

void deal(const std::vector<std::size_t>& items, const std::array<std::size_t, 3>& sizes,
          SplitIndices& out) {
  auto it = items.begin();
  for (auto [dst, count] : {std::pair{&out.train, sizes[0]}, std::pair{&out.val, sizes[1]},
                            std::pair{&out.test, sizes[2]}}) {
    dst->insert(dst->end(), it, it + static_cast<std::ptrdiff_t>(count));
    it += static_cast<std::ptrdiff_t>(count);
  }
}

}  // namespace

SplitIndices split_indices(const Dataset& ds, const SplitSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SplitIndices out;
  if (spec.stratified) {
    for (int label : {kNegative, kPositive}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.y[i] == label) members.push_back(i);
      }
      rng.shuffle(members);
      const auto sizes = split_sizes(members.size(), spec);
      if (sizes[0] == 0 || sizes[1] == 0 || sizes[2] == 0) {
        throw StratificationError(fmt::format(
            "class {} has {} samples, too few to appear in every split", label, members.size()));
      }
      deal(members, sizes, out);
    }
  } else {
    std::vector<std::size_t> all(ds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    rng.shuffle(all);
    deal(all, split_sizes(all.size(), spec), out);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

Splits split(const Dataset& ds, const SplitSpec& spec) {
  const auto idx = split_indices(ds, spec);
  return {ds.subset(idx.train), ds.subset(idx.val), ds.subset(idx.test)};
}

Dataset FeatureScaling::apply(const Dataset& ds) const {
  if (means.size() != ds.dim() || stds.size() != ds.dim()) {
    throw ContractError("scaling dimension does not match dataset");
  }
  Dataset out = ds;
  for (std::size_t j = 0; j < ds.dim(); ++j) {
    auto col = out.X.col(static_cast<Eigen::Index>(j));
    col = (col.array() - means[j]) / stds[j];
  }
  out.feature_means = means;
  out.feature_stds = stds;
  return out;
}

FeatureScaling fit_scaling(const Dataset& train) {
  if (train.size() == 0) throw ContractError("cannot standardize an empty training split");
  FeatureScaling s;
  const double n = static_cast<double>(train.size());
  for (std::size_t j = 0; j < train.dim(); ++j) {
    const auto col = train.X.col(static_cast<Eigen::Index>(j));
    const double mean = col.sum() / n;
    const double var = (col.array() - mean).square().sum() / n;
    if (var > 0.0) {
      s.means.push_back(mean);
      s.stds.push_back(std::sqrt(var));
    } else {
      s.means.push_back(0.0);
      s.stds.push_back(1.0);
    }
  }
  return s;
}

FeatureScaling standardize(Splits& splits) {
  auto scaling = fit_scaling(splits.train);
  splits.train = scaling.apply(splits.train);
  splits.val = scaling.apply(splits.val);
  splits.test = scaling.apply(splits.test);
  return scaling;
}

}  // namespace cdprune
