#include "cdprune/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cdprune/errors.hpp"

namespace cdprune {

namespace {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts count_classes(std::span<const double> scores, std::span<const int> y) {
  if (scores.size() != y.size()) throw ContractError("scores and labels disagree");
  ClassCounts counts;
  for (int label : y) {
    if (label == kPositive) {
      ++counts.pos;
    } else if (label == kNegative) {
      ++counts.neg;
    } else {
      throw ContractError("labels must be 0 or 1");
    }
  }
  return counts;
}

ClassCounts require_both(std::span<const double> scores, std::span<const int> y) {
  const auto counts = count_classes(scores, y);
  if (counts.pos == 0 || counts.neg == 0) {
    throw UndefinedMetric("AUC needs at least one positive and one negative");
  }
  return counts;
}

}  // namespace

std::vector<double> scores_from_logits(const Matrix& logits) {
  if (logits.cols() != 2) throw ContractError("logits must have 2 columns");
  std::vector<double> scores(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    scores[static_cast<std::size_t>(i)] = logits(i, 1) - logits(i, 0);
  }
  return scores;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 share ranks i+1..j
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double auc_pairwise(std::span<const double> scores, std::span<const int> y) {
  const auto counts = require_both(scores, y);
  // Count in half-pair units to stay in exact integer arithmetic.
  unsigned long long halves = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != kPositive) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != kNegative) continue;
      if (scores[i] > scores[j]) {
        halves += 2;
      } else if (scores[i] == scores[j]) {
        halves += 1;
      }
    }
  }
  const double pairs = static_cast<double>(counts.pos) * static_cast<double>(counts.neg);
  return 0.5 * static_cast<double>(halves) / pairs;
}

double auc_rank(std::span<const double> scores, std::span<const int> y) {
  const auto counts = require_both(scores, y);
  const auto ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == kPositive) rank_sum += ranks[i];
  }
  const double n_pos = static_cast<double>(counts.pos);
  const double n_neg = static_cast<double>(counts.neg);
  const double u = rank_sum - n_pos * (n_pos + 1.0) / 2.0;
  return u / (n_pos * n_neg);
}

double auc_bound_proxy(std::span<const double> scores, std::span<const int> y) {
  const auto counts = require_both(scores, y);
  const double pairs = static_cast<double>(counts.pos) * static_cast<double>(counts.neg);
  return 1.0 - hinge_rank_loss_eval(scores, y) / pairs;
}

void EvalReport::check_identities() const {
  if (tp + fn != n_pos || tn + fp != n_neg) throw ContractError("confusion counts do not sum");
  const double n = static_cast<double>(n_pos + n_neg);
  if (n > 0 && accuracy != static_cast<double>(tp + tn) / n) {
    throw ContractError("accuracy does not match counts");
  }
  if ((n_pos > 0) != fnr.has_value() || (n_neg > 0) != fpr.has_value()) {
    throw ContractError("rate definedness does not match class presence");
  }
  if (fnr && *fnr != static_cast<double>(fn) / static_cast<double>(n_pos)) {
    throw ContractError("fnr does not match counts");
  }
  if (fpr && *fpr != static_cast<double>(fp) / static_cast<double>(n_neg)) {
    throw ContractError("fpr does not match counts");
  }
}

EvalReport confusion(std::span<const double> scores, std::span<const int> y, double threshold) {
  const auto counts = count_classes(scores, y);
  EvalReport r;
  r.n_pos = counts.pos;
  r.n_neg = counts.neg;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool predicted_pos = scores[i] > threshold;
    if (y[i] == kPositive) {
      predicted_pos ? ++r.tp : ++r.fn;
    } else {
      predicted_pos ? ++r.fp : ++r.tn;
    }
  }
  const std::size_t n = r.n_pos + r.n_neg;
  r.accuracy = n == 0 ? 0.0 : static_cast<double>(r.tp + r.tn) / static_cast<double>(n);
  if (r.n_pos > 0) r.fnr = static_cast<double>(r.fn) / static_cast<double>(r.n_pos);
  if (r.n_neg > 0) r.fpr = static_cast<double>(r.fp) / static_cast<double>(r.n_neg);
  r.auc = (r.n_pos > 0 && r.n_neg > 0) ? auc_rank(scores, y)
                                       : std::numeric_limits<double>::quiet_NaN();
  return r;
}

EvalReport evaluate(const Matrix& logits, std::span<const int> y) {
  const auto scores = scores_from_logits(logits);
  return confusion(scores, y, 0.0);
}

}  // namespace cdprune
