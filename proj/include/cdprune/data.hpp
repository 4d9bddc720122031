#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cdprune/types.hpp"

namespace cdprune {

class Rng;

struct Dataset {
  Matrix X;  // [n x d]
  Labels y;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  /// Filled by standardize(); empty for raw data.
  std::vector<double> feature_means;
  std::vector<double> feature_stds;
  /// Human-readable origin, e.g. "gaussians(...)" or "csv:path (n rows)".
  std::string provenance;

  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(X.cols()); }
  /// Recomputes n_pos/n_neg from y and checks labels and shapes.
  void recount();
  Dataset subset(const std::vector<std::size_t>& rows) const;
};

struct GaussianSpec {
  std::size_t n_pos = 400;
  std::size_t n_neg = 2000;
  std::size_t dim = 2;
  double separation = 2.0;
  double spread = 1.0;
  std::uint64_t seed = 0;
};

/// Negatives ~ N(0, spread^2 I); positives ~ N(separation * e1, spread^2 I).
/// Rows are interleaved in a seeded random order.
Dataset gen_gaussians(const GaussianSpec& spec);

/// Last column is the 0/1 label, the others numeric features. A first row
/// with any non-numeric cell is treated as a header.
Dataset load_csv(const std::filesystem::path& path);
void write_csv(const Dataset& ds, const std::filesystem::path& path);

struct SplitSpec {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
  bool stratified = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Splits {
  Dataset train;
  Dataset val;
  Dataset test;
};

/// Row indices assigned to each split; disjoint and exhaustive.
struct SplitIndices {
  std::vector<std::size_t> train, val, test;
};

SplitIndices split_indices(const Dataset& ds, const SplitSpec& spec);
Splits split(const Dataset& ds, const SplitSpec& spec);

struct FeatureScaling {
  std::vector<double> means;
  std::vector<double> stds;

  Dataset apply(const Dataset& ds) const;
};

/// Per-feature mean and population std of `train`. Zero-variance features
/// get mean 0 and std 1 so they pass through untouched.
FeatureScaling fit_scaling(const Dataset& train);

/// Fits on the training split and applies the same transform to all three.
FeatureScaling standardize(Splits& splits);

}  // namespace cdprune
