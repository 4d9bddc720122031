#include "cdprune/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "cdprune/checkpoint.hpp"
#include "cdprune/errors.hpp"

namespace cdprune {

namespace {

bool score_order(const ScoredWeight& a, const ScoredWeight& b) {
  if (a.score != b.score) return a.score < b.score;
  if (a.layer != b.layer) return a.layer < b.layer;
  return a.index < b.index;
}

std::size_t prune_count(double p, std::size_t surviving) {
  return static_cast<std::size_t>(std::floor(p / 100.0 * static_cast<double>(surviving)));
}

}  // namespace

std::vector<ScoredWeight> magnitude_increase_scores(std::span<const Matrix> initial,
                                                    std::span<const Matrix> trained,
                                                    const PruneMask& mask, ScoreMode mode) {
  if (initial.size() != trained.size() || initial.size() != mask.layers.size()) {
    throw ContractError("score inputs have different layer counts");
  }
  std::vector<ScoredWeight> scores;
  scores.reserve(mask.surviving);
  for (std::size_t l = 0; l < initial.size(); ++l) {
    const auto& w0 = initial[l];
    const auto& wk = trained[l];
    const auto& m = mask.layers[l];
    if (w0.rows() != wk.rows() || w0.cols() != wk.cols() || m.rows() != w0.rows() ||
        m.cols() != w0.cols()) {
      throw ContractError(fmt::format("score inputs disagree in shape at layer {}", l));
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (m.data()[i] == 0.0) continue;
      const double a = wk.data()[i];
      const double b = w0.data()[i];
      const double s = mode == ScoreMode::magnitude_increase ? std::abs(a) - std::abs(b) : a - b;
      scores.push_back({l, static_cast<std::size_t>(i), s});
    }
  }
  return scores;
}

std::vector<ScoredWeight> magnitude_increase_scores(const Network& net, const PruneMask& mask,
                                                    ScoreMode mode) {
  std::vector<Matrix> initial, trained;
  for (const auto& layer : net.layers()) {
    initial.push_back(layer.W0);
    trained.push_back(layer.W);
  }
  return magnitude_increase_scores(initial, trained, mask, mode);
}

PruneMask prune_step(const PruneMask& mask, std::span<const ScoredWeight> scores, double p,
                     PruneScope scope) {
  if (!(p > 0.0 && p < 100.0)) throw ContractError("prune percentage must be in (0, 100)");
  if (scores.size() != mask.surviving) {
    throw ContractError(fmt::format("{} scores for {} surviving weights", scores.size(),
                                    mask.surviving));
  }
  for (const auto& s : scores) {
    if (s.layer >= mask.layers.size() ||
        s.index >= static_cast<std::size_t>(mask.layers[s.layer].size()) ||
        mask.layers[s.layer].data()[s.index] != 1.0) {
      throw ContractError("score refers to a position that is not surviving");
    }
    if (std::isnan(s.score)) throw NumericFault("NaN pruning score");
  }

  std::vector<ScoredWeight> ranked(scores.begin(), scores.end());
  std::sort(ranked.begin(), ranked.end(), score_order);

  PruneMask next = mask;
  std::size_t removed = 0;
  if (scope == PruneScope::global) {
    const std::size_t count = prune_count(p, mask.surviving);
    for (std::size_t i = 0; i < count; ++i) {
      next.layers[ranked[i].layer].data()[ranked[i].index] = 0.0;
    }
    removed = count;
  } else {
    for (std::size_t l = 0; l < mask.layers.size(); ++l) {
      std::size_t alive = 0;
      for (const auto& s : ranked) alive += s.layer == l;
      const std::size_t count = prune_count(p, alive);
      std::size_t done = 0;
      for (const auto& s : ranked) {
        if (done == count) break;
        if (s.layer != l) continue;
        next.layers[l].data()[s.index] = 0.0;
        ++done;
      }
      removed += count;
    }
  }
  if (removed >= mask.surviving) {
    throw ExhaustedNetwork("pruning would leave no surviving weights");
  }
  next.surviving = mask.surviving - removed;
  next.round = mask.round + 1;
  return next;
}

void rewind(Network& net, const PruneMask& mask) {
  if (!mask.matches(net)) throw ContractError("mask shape does not match network");
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& layer = layers[l];
    layer.W = (mask.layers[l].array() != 0.0).select(layer.W0, 0.0);
    layer.b.setZero();
  }
}

void LtConfig::validate() const {
  if (layer_dims.size() < 2 || layer_dims.back() != 2 ||
      std::any_of(layer_dims.begin(), layer_dims.end(), [](int d) { return d < 1; })) {
    throw ValidationError("layer_dims must have >= 2 positive entries ending in 2");
  }
  if (rounds < 1) throw ValidationError("rounds must be >= 1");
  if (k < 1) throw ValidationError("k must be >= 1");
  if (!(p > 0.0 && p < 100.0)) throw ValidationError("p must be in (0, 100)");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("lr must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("momentum must be in [0, 1)");
  try {
    loss.validate();
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
}

double train_round(Network& net, const PruneMask& mask, MomentumState& state,
                   const Dataset& train, const LtConfig& config, int round, Rng& rng,
                   const LtHooks& hooks) {
  const std::size_t n = train.size();
  if (n == 0) throw ContractError("empty training set");
  const std::size_t batch = (config.batch_size == 0 || config.batch_size >= n) ? n : config.batch_size;
  const std::size_t steps_per_epoch = (n + batch - 1) / batch;

  const ClassWeights round_gamma = config.loss.gamma_for_round(round);
  const ClassWeights later_gamma = config.loss.gamma_for_round(std::max(round, 1));
  const ClassWeights first_gamma = config.loss.gamma_for_round(0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Matrix Xb;
  Labels yb;
  ForwardTrace trace;
  Gradients grads;
  for (long long step = 0; step < config.k; ++step) {
    const std::size_t pos = static_cast<std::size_t>(step) % steps_per_epoch;
    const bool first_epoch = round == 0 && static_cast<std::size_t>(step) < steps_per_epoch;
    ClassWeights gamma = round_gamma;
    if (config.gamma_warmup == GammaWarmup::first_epoch) {
      gamma = first_epoch ? first_gamma : later_gamma;
    }

    const Matrix* X = &train.X;
    std::span<const int> y = train.y;
    if (batch < n) {
      if (pos == 0) rng.shuffle(order);
      const std::size_t begin = pos * batch;
      const std::size_t end = std::min(n, begin + batch);
      Xb.resize(static_cast<Eigen::Index>(end - begin), train.X.cols());
      yb.resize(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        Xb.row(static_cast<Eigen::Index>(i - begin)) = train.X.row(static_cast<Eigen::Index>(order[i]));
        yb[i - begin] = train.y[order[i]];
      }
      X = &Xb;
      y = yb;
    }

    forward_trace(net, mask, *X, trace);
    const auto loss = combined_loss(trace.logits, y, gamma, config.loss.lambda);
    backward(net, mask, trace, loss.grad_logits, grads);
    sgd_step(net, grads, state, config.lr, config.momentum);
    if (hooks.after_step) hooks.after_step(round, step, net, mask);
  }
  return static_cast<double>(config.k) / static_cast<double>(steps_per_epoch);
}

namespace {

EvalReport eval_split(const Network& net, const PruneMask& mask, const Dataset& ds,
                      ClassWeights gamma, ClassWeights lambda) {
  const Matrix logits = forward(net, mask, ds.X);
  auto report = evaluate(logits, ds.y);
  report.loss = combined_loss(logits, ds.y, gamma, lambda);
  report.loss->grad_logits.resize(0, 2);
  return report;
}

}  // namespace

LtResult lt_run(const LtConfig& config, const Splits& data, const LtHooks& hooks) {
  config.validate();
  if (data.train.dim() != static_cast<std::size_t>(config.layer_dims.front())) {
    throw ValidationError(fmt::format("data has {} features, network expects {}",
                                      data.train.dim(), config.layer_dims.front()));
  }
  LtResult result;
  result.network = init_network(config.layer_dims, config.seed);
  result.mask = PruneMask::ones(result.network);
  auto state = MomentumState::zeros(result.network);
  Rng rng(derive_seed(config.seed, 0x6d62));

  Network& net = result.network;
  PruneMask& mask = result.mask;
  for (int round = 0; round < config.rounds; ++round) {
    try {
      RoundResult rr;
      rr.round = round;
      rr.surviving = mask.surviving;
      rr.total = mask.total();
      rr.remaining_fraction = mask.remaining_fraction();
      rr.steps = config.k;
      rr.epochs = train_round(net, mask, state, data.train, config, round, rng, hooks);

      const ClassWeights gamma = config.loss.gamma_for_round(round);
      rr.val = eval_split(net, mask, data.val, gamma, config.loss.lambda);
      rr.test = eval_split(net, mask, data.test, gamma, config.loss.lambda);
      if (config.checkpoint_dir) {
        rr.checkpoint = *config.checkpoint_dir / fmt::format("round_{}.ckpt.json", round);
        save_checkpoint(net, mask, *rr.checkpoint);
      }
      result.rounds.push_back(std::move(rr));

      if (round + 1 < config.rounds) {
        const auto scores = magnitude_increase_scores(net, mask, config.score_mode);
        auto next = prune_step(mask, scores, config.p, config.scope);
        if (next.surviving == mask.surviving) {
          throw ExhaustedNetwork(fmt::format(
              "p={} removes no weights from {} survivors", config.p, mask.surviving));
        }
        mask = std::move(next);
        rewind(net, mask);
        state.reset();
        if (hooks.after_rewind) hooks.after_rewind(round + 1, net, mask);
      }
    } catch (const NumericFault& e) {
      result.status = RunStatus::numeric_fault;
      result.error = fmt::format("round {}: {}", round, e.what());
      break;
    } catch (const ExhaustedNetwork& e) {
      result.status = RunStatus::exhausted;
      result.error = fmt::format("round {}: {}", round, e.what());
      break;
    }
  }
  return result;
}

const char* to_string(ScoreMode mode) {
  return mode == ScoreMode::magnitude_increase ? "magnitude_increase" : "signed_difference";
}

const char* to_string(PruneScope scope) {
  return scope == PruneScope::global ? "global" : "per_layer";
}

const char* to_string(GammaWarmup warmup) {
  return warmup == GammaWarmup::first_round ? "first_round" : "first_epoch";
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::numeric_fault: return "numeric_fault";
    case RunStatus::exhausted: return "exhausted";
  }
  return "unknown";
}

}  // namespace cdprune
