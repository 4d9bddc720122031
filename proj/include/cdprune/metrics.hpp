#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cdprune/loss.hpp"
#include "cdprune/types.hpp"

namespace cdprune {

/// Ranking score of each row: logit_pos - logit_neg.
std::vector<double> scores_from_logits(const Matrix& logits);

/// 1-based ascending ranks; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Brute force over all positive/negative pairs; ties count 1/2.
double auc_pairwise(std::span<const double> scores, std::span<const int> y);

/// Mann-Whitney rank-sum form of the same quantity, O(n log n).
double auc_rank(std::span<const double> scores, std::span<const int> y);

/// 1 - L_HR / (n_pos * n_neg), with L_HR from hinge_rank_loss_eval.
double auc_bound_proxy(std::span<const double> scores, std::span<const int> y);

struct EvalReport {
  double auc = 0.0;
  double accuracy = 0.0;
  /// Empty when the corresponding class is absent.
  std::optional<double> fnr;
  std::optional<double> fpr;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t n_pos = 0, n_neg = 0;
  std::optional<LossBreakdown> loss;

  /// Verifies the count/rate identities; throws ContractError otherwise.
  void check_identities() const;
};

/// Confusion counts for "predict positive iff score > threshold". The AUC
/// field is left undefined (NaN) when only one class is present.
EvalReport confusion(std::span<const double> scores, std::span<const int> y,
                     double threshold = 0.0);

/// Confusion counts at the argmax decision plus AUC from the logits.
EvalReport evaluate(const Matrix& logits, std::span<const int> y);

}  // namespace cdprune
