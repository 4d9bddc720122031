#include "cdprune/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdprune/errors.hpp"
#include "cdprune/metrics.hpp"

namespace cdprune {

namespace {

void require_logits(const Matrix& logits, std::span<const int> y) {
  if (logits.cols() != 2) throw ContractError("logits must have 2 columns");
  if (static_cast<std::size_t>(logits.rows()) != y.size()) {
    throw ContractError("logit rows and labels disagree");
  }
}

double signed_label(int label) { return label == kPositive ? 1.0 : -1.0; }

}  // namespace

ClassWeights LossConfig::gamma_for_round(int round) const {
  if (gamma_schedule.empty()) throw DomainError("empty gamma schedule");
  if (round < 0) throw ContractError("negative round index");
  const auto idx = std::min(static_cast<std::size_t>(round), gamma_schedule.size() - 1);
  return gamma_schedule[idx];
}

void LossConfig::validate() const {
  if (gamma_schedule.empty()) throw DomainError("gamma schedule must not be empty");
  for (const auto& g : gamma_schedule) {
    if (!(g.neg >= 0.0 && g.pos >= 0.0)) throw DomainError("gamma weights must be >= 0");
  }
  if (!(lambda.neg >= 0.0 && lambda.pos >= 0.0)) throw DomainError("lambda weights must be >= 0");
  if (beta && !(*beta >= 0.0 && *beta < 1.0)) throw DomainError("beta must be in [0, 1)");
}

double gamma_from_beta(double beta, long long n_c) {
  if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("beta must be in [0, 1)");
  if (n_c < 1) throw DomainError("class count must be >= 1");
  if (beta == 0.0 || n_c == 1) return 1.0;
  // 1 - beta^n = -expm1(n * log1p(-(1 - beta))); 1 - beta is exact near 1.
  const double one_minus_beta = 1.0 - beta;
  const double denom = -std::expm1(static_cast<double>(n_c) * std::log1p(-one_minus_beta));
  return one_minus_beta / denom;
}

double class_weight_ratio(long long n_neg, long long n_pos) {
  if (n_neg < 1 || n_pos < 1) throw DomainError("class counts must be >= 1");
  return static_cast<double>(n_neg) / static_cast<double>(n_pos);
}

ClassWeights gammas_from_beta(double beta, long long n_neg, long long n_pos) {
  const double g_neg = gamma_from_beta(beta, n_neg);
  const double g_pos = gamma_from_beta(beta, n_pos);
  return {1.0, g_pos / g_neg};
}

LossTerm weighted_ce(const Matrix& logits, std::span<const int> y, ClassWeights gamma) {
  require_logits(logits, y);
  const auto n = logits.rows();
  LossTerm out;
  out.grad_logits = Matrix::Zero(n, 2);
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  double acc = 0.0;
  for (Eigen::Index o = 0; o < n; ++o) {
    const double z0 = logits(o, 0);
    const double z1 = logits(o, 1);
    const double m = std::max(z0, z1);
    const double lse = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
    const int c = y[static_cast<std::size_t>(o)];
    const double nll = lse - (c == kPositive ? z1 : z0);
    const double w = gamma[c];
    acc += w * nll;
    const double p0 = std::exp(z0 - lse);
    const double p1 = std::exp(z1 - lse);
    out.grad_logits(o, 0) = w * (p0 - (c == kNegative ? 1.0 : 0.0)) * inv_n;
    out.grad_logits(o, 1) = w * (p1 - (c == kPositive ? 1.0 : 0.0)) * inv_n;
  }
  out.loss = acc / static_cast<double>(n);
  return out;
}

LossTerm squared_hinge_surrogate(const Matrix& logits, std::span<const int> y,
                                 ClassWeights lambda) {
  require_logits(logits, y);
  const auto n = logits.rows();
  LossTerm out;
  out.grad_logits = Matrix::Zero(n, 2);
  if (n == 0) return out;
  double acc = 0.0;
  for (Eigen::Index o = 0; o < n; ++o) {
    const int c = y[static_cast<std::size_t>(o)];
    const double yh = signed_label(c);
    const double s = logits(o, 1) - logits(o, 0);
    const double slack = std::max(0.0, 1.0 - yh * s);
    if (slack == 0.0 || lambda[c] == 0.0) continue;
    acc += lambda[c] * slack * slack;
    const double ds = -2.0 * lambda[c] * yh * slack / static_cast<double>(n);
    out.grad_logits(o, 1) = ds;
    out.grad_logits(o, 0) = -ds;
  }
  out.loss = acc / static_cast<double>(n);
  return out;
}

double hinge_rank_loss_eval(std::span<const double> scores, std::span<const int> y) {
  if (scores.size() != y.size()) throw ContractError("scores and labels disagree");
  const auto n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), kPositive));
  const std::size_t n_neg = y.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw UndefinedMetric("hinge rank loss needs both classes present");
  }
  const auto ranks = average_ranks(scores);
  const double threshold = static_cast<double>(n_neg) + 0.5;
  double loss = 0.0;
  for (std::size_t o = 0; o < y.size(); ++o) {
    const double slack = std::max(0.0, 1.0 - signed_label(y[o]) * (ranks[o] - threshold));
    loss += slack * slack;
  }
  return loss;
}

LossBreakdown combined_loss(const Matrix& logits, std::span<const int> y, ClassWeights gamma,
                            ClassWeights lambda) {
  auto ce = weighted_ce(logits, y, gamma);
  auto hinge = squared_hinge_surrogate(logits, y, lambda);
  LossBreakdown out;
  out.wce = ce.loss;
  out.shr = hinge.loss;
  out.total = out.wce + out.shr;
  out.grad_logits = std::move(ce.grad_logits);
  out.grad_logits += hinge.grad_logits;
  if (!out.grad_logits.allFinite()) throw NumericFault("non-finite loss gradient");
  return out;
}

LossBreakdown combined_loss(const Matrix& logits, std::span<const int> y,
                            const LossConfig& config, int round) {
  return combined_loss(logits, y, config.gamma_for_round(round), config.lambda);
}

}  // namespace cdprune
