#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cdprune/types.hpp"

namespace cdprune {

/// A pair of per-class coefficients indexed by class label.
struct ClassWeights {
  double neg = 1.0;
  double pos = 1.0;

  double operator[](int label) const { return label == kPositive ? pos : neg; }
  bool operator==(const ClassWeights&) const = default;
};

/// Class-dependent objective settings.
///
/// `gamma_schedule[r]` holds the cross-entropy weights for pruning round r
/// (0-based); rounds past the end reuse the last entry. `lambda` weights the
/// squared hinge term per class. `beta`, when present, documents the
/// effective-number setting the gammas were derived from.
struct LossConfig {
  std::vector<ClassWeights> gamma_schedule{ClassWeights{}};
  ClassWeights lambda{0.0, 0.0};
  std::optional<double> beta;

  ClassWeights gamma_for_round(int round) const;
  /// Throws DomainError on an empty schedule or negative weights.
  void validate() const;
};

/// A loss value with its gradient on the [n x 2] logits.
struct LossTerm {
  double loss = 0.0;
  Matrix grad_logits;
};

struct LossBreakdown {
  double wce = 0.0;
  double shr = 0.0;
  double total = 0.0;
  Matrix grad_logits;
};

/// (1 - beta) / (1 - beta^n_c), evaluated stably for beta close to 1.
double gamma_from_beta(double beta, long long n_c);

/// Positive-class weight with the majority class normalized to 1.
double class_weight_ratio(long long n_neg, long long n_pos);

/// Effective-number weights for both classes, rescaled so the negative class is 1.
ClassWeights gammas_from_beta(double beta, long long n_neg, long long n_pos);

/// Mean class-weighted softmax cross-entropy over the batch.
LossTerm weighted_ce(const Matrix& logits, std::span<const int> y, ClassWeights gamma);

/// Mean of lambda_c * max(0, 1 - y_hat * s)^2 with s = logit_pos - logit_neg
/// and y_hat = +1 for positives, -1 for negatives.
LossTerm squared_hinge_surrogate(const Matrix& logits, std::span<const int> y,
                                 ClassWeights lambda);

/// Rank-space squared hinge diagnostic: sum over samples of
/// max(0, 1 - y_hat * (rank - (n_neg + 0.5)))^2, ranks ascending, ties averaged.
double hinge_rank_loss_eval(std::span<const double> scores, std::span<const int> y);

LossBreakdown combined_loss(const Matrix& logits, std::span<const int> y, ClassWeights gamma,
                            ClassWeights lambda);
LossBreakdown combined_loss(const Matrix& logits, std::span<const int> y,
                            const LossConfig& config, int round);

}  // namespace cdprune
