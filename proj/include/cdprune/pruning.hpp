#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdprune/data.hpp"
#include "cdprune/loss.hpp"
#include "cdprune/mask.hpp"
#include "cdprune/metrics.hpp"
#include "cdprune/nn.hpp"
#include "cdprune/rng.hpp"

namespace cdprune {

enum class ScoreMode {
  magnitude_increase,  // |Wk| - |W0|
  signed_difference,   // Wk - W0
};

enum class PruneScope { global, per_layer };

/// Which part of training uses the first gamma schedule entry.
enum class GammaWarmup {
  first_round,  // all k steps of round 0
  first_epoch,  // only the first pass over the training set
};

/// Score of one surviving weight; `index` is the row-major offset in its layer.
struct ScoredWeight {
  std::size_t layer = 0;
  std::size_t index = 0;
  double score = 0.0;
};

/// Scores of the surviving positions in (layer, row-major) order.
std::vector<ScoredWeight> magnitude_increase_scores(std::span<const Matrix> initial,
                                                    std::span<const Matrix> trained,
                                                    const PruneMask& mask,
                                                    ScoreMode mode = ScoreMode::magnitude_increase);
std::vector<ScoredWeight> magnitude_increase_scores(const Network& net, const PruneMask& mask,
                                                    ScoreMode mode = ScoreMode::magnitude_increase);

/// Zeroes floor(p/100 * surviving) lowest-scored survivors. Ties go to the
/// lower (layer, index) first. With PruneScope::per_layer the count and
/// ranking are taken within each layer instead.
PruneMask prune_step(const PruneMask& mask, std::span<const ScoredWeight> scores, double p,
                     PruneScope scope = PruneScope::global);

/// W := m (.) W0 with pruned entries +0.0; biases back to their initial zeros.
void rewind(Network& net, const PruneMask& mask);

struct LtConfig {
  std::vector<int> layer_dims;
  std::uint64_t seed = 0;
  LossConfig loss;
  int rounds = 7;
  int k = 100;
  double p = 50.0;
  double lr = 0.05;
  double momentum = 0.9;
  /// 0 means full-batch.
  std::size_t batch_size = 0;
  ScoreMode score_mode = ScoreMode::magnitude_increase;
  PruneScope scope = PruneScope::global;
  GammaWarmup gamma_warmup = GammaWarmup::first_round;
  /// When set, `round_<r>.ckpt.json` is written here after each round.
  std::optional<std::filesystem::path> checkpoint_dir;

  /// Throws ValidationError.
  void validate() const;
};

struct RoundResult {
  int round = 0;
  std::size_t surviving = 0;
  std::size_t total = 0;
  double remaining_fraction = 1.0;
  /// Optimizer steps and epochs completed in this round.
  long long steps = 0;
  double epochs = 0.0;
  EvalReport val;
  EvalReport test;
  std::optional<std::filesystem::path> checkpoint;
};

enum class RunStatus { ok, numeric_fault, exhausted };

struct LtResult {
  std::vector<RoundResult> rounds;
  RunStatus status = RunStatus::ok;
  std::string error;
  Network network;
  PruneMask mask;
};

/// Observation points inside lt_run; all optional.
struct LtHooks {
  std::function<void(int round, long long step, const Network&, const PruneMask&)> after_step;
  std::function<void(int round, const Network&, const PruneMask&)> after_rewind;
};

/// Train k steps on one round's mask; returns the number of epochs covered.
double train_round(Network& net, const PruneMask& mask, MomentumState& state,
                   const Dataset& train, const LtConfig& config, int round, Rng& rng,
                   const LtHooks& hooks = {});

/// The iterative class-dependent lottery-ticket loop. Numeric faults and
/// exhaustion stop the loop; rounds completed so far are kept and the status
/// records the failure.
LtResult lt_run(const LtConfig& config, const Splits& data, const LtHooks& hooks = {});

const char* to_string(ScoreMode mode);
const char* to_string(PruneScope scope);
const char* to_string(GammaWarmup warmup);
const char* to_string(RunStatus status);

}  // namespace cdprune
