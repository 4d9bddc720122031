#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdprune/data.hpp"
#include "cdprune/loss.hpp"
#include "cdprune/pruning.hpp"

namespace cdprune {

/// A named loss/pruning parameterization. Presets: red, blue, black, green.
struct Scenario {
  std::string name = "red";
  LossConfig loss;
  int rounds = 7;
  int k = 100;
  double p = 50.0;
  double lr = 0.05;
  double momentum = 0.9;
  std::vector<std::uint64_t> seeds{0};
};

struct DataConfig {
  enum class Source { gaussians, csv };
  Source source = Source::gaussians;
  std::size_t n_pos = 400;
  std::size_t n_neg = 2000;
  std::size_t dim = 2;
  double separation = 2.0;
  double spread = 1.0;
  std::filesystem::path csv_path;
  SplitSpec split;  // seed is replaced per run seed
};

struct ExperimentConfig {
  Scenario scenario;
  DataConfig data;
  std::vector<int> hidden{41, 10};  // 512 weights for a 2-d input
  std::size_t batch_size = 0;
  ScoreMode score_mode = ScoreMode::magnitude_increase;
  PruneScope scope = PruneScope::global;
  GammaWarmup gamma_warmup = GammaWarmup::first_round;

  /// Everything checkable before compute; throws ValidationError.
  void validate() const;
  /// LtConfig for one seed of this experiment.
  LtConfig lt_config(std::uint64_t seed, std::size_t input_dim) const;
};

const std::vector<std::string>& preset_names();

/// Throws ValidationError listing the valid names for an unknown preset.
Scenario preset(const std::string& name);

nlohmann::json to_json(const ExperimentConfig& config);

/// Reads a config document. Fields absent from the document keep the values
/// of the named preset (or `base` when no scenario is named). A "custom"
/// scenario must spell out every scenario field. A manifest written by
/// `run` is accepted as well: its "config" member is used.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Seed streams derived from a run seed.
std::uint64_t data_seed(std::uint64_t run_seed);
std::uint64_t split_seed(std::uint64_t run_seed);
std::uint64_t network_seed(std::uint64_t run_seed);

}  // namespace cdprune
