#include "cdprune/scenario.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "cdprune/errors.hpp"
#include "cdprune/rng.hpp"

namespace cdprune {

using nlohmann::json;

namespace {

json weights_to_json(ClassWeights w) { return json{{"neg", w.neg}, {"pos", w.pos}}; }

ClassWeights weights_from_json(const json& j) {
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  return {j.at("neg").get<double>(), j.at("pos").get<double>()};
}

template <typename Enum>
Enum enum_from_string(const std::string& s, std::initializer_list<Enum> values, const char* what) {
  for (Enum v : values) {
    if (s == to_string(v)) return v;
  }
  throw ValidationError(fmt::format("unknown {} '{}'", what, s));
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"red", "blue", "black", "green"};
  return names;
}

Scenario preset(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "red") {
    s.loss.gamma_schedule = {{1.0, 1.0}};
    s.loss.lambda = {0.0, 0.0};
  } else if (name == "blue") {
    s.loss.gamma_schedule = {{1.0, 1.0}};
    s.loss.lambda = {5.0, 5.0};
  } else if (name == "black") {
    s.loss.gamma_schedule = {{1.0, 1.0}, {1.0, 5.0}};
    s.loss.lambda = {5.0, 5.0};
  } else if (name == "green") {
    s.loss.gamma_schedule = {{1.0, 10.0}};
    s.loss.lambda = {5.0, 5.0};
  } else {
    throw ValidationError(fmt::format("unknown preset '{}'; valid presets: {}", name,
                                      fmt::join(preset_names(), ", ")));
  }
  return s;
}

void ExperimentConfig::validate() const {
  const auto& s = scenario;
  if (s.rounds < 1) throw ValidationError("rounds must be >= 1");
  if (s.k < 1) throw ValidationError("k must be >= 1");
  if (!(s.p > 0.0 && s.p < 100.0)) throw ValidationError(fmt::format("p={} is outside (0, 100)", s.p));
  if (!(s.lr > 0.0)) throw ValidationError("lr must be > 0");
  if (!(s.momentum >= 0.0 && s.momentum < 1.0)) throw ValidationError("momentum must be in [0, 1)");
  if (s.seeds.empty()) throw ValidationError("at least one seed is required");
  try {
    s.loss.validate();
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  if (std::any_of(hidden.begin(), hidden.end(), [](int h) { return h < 1; })) {
    throw ValidationError("hidden layer sizes must be >= 1");
  }
  data.split.validate();
  if (data.source == DataConfig::Source::gaussians) {
    if (data.n_pos < 1 || data.n_neg < 1) throw ValidationError("class counts must be >= 1");
    if (data.dim < 2) throw ValidationError("dim must be >= 2");
    if (!(data.separation >= 0.0)) throw ValidationError("separation must be >= 0");
    if (!(data.spread > 0.0)) throw ValidationError("spread must be > 0");
  } else if (data.csv_path.empty()) {
    throw ValidationError("csv data source needs a path");
  }
}

LtConfig ExperimentConfig::lt_config(std::uint64_t seed, std::size_t input_dim) const {
  LtConfig c;
  c.layer_dims.push_back(static_cast<int>(input_dim));
  c.layer_dims.insert(c.layer_dims.end(), hidden.begin(), hidden.end());
  c.layer_dims.push_back(2);
  c.seed = network_seed(seed);
  c.loss = scenario.loss;
  c.rounds = scenario.rounds;
  c.k = scenario.k;
  c.p = scenario.p;
  c.lr = scenario.lr;
  c.momentum = scenario.momentum;
  c.batch_size = batch_size;
  c.score_mode = score_mode;
  c.scope = scope;
  c.gamma_warmup = gamma_warmup;
  return c;
}

json to_json(const ExperimentConfig& config) {
  const auto& s = config.scenario;
  json gammas = json::array();
  for (const auto& g : s.loss.gamma_schedule) gammas.push_back(weights_to_json(g));
  json data;
  if (config.data.source == DataConfig::Source::gaussians) {
    data = {{"source", "gaussians"},
            {"n_pos", config.data.n_pos},
            {"n_neg", config.data.n_neg},
            {"dim", config.data.dim},
            {"separation", config.data.separation},
            {"spread", config.data.spread}};
  } else {
    data = {{"source", "csv"}, {"csv", config.data.csv_path.string()}};
  }
  data["split"] = {config.data.split.train, config.data.split.val, config.data.split.test};
  data["stratified"] = config.data.split.stratified;

  json doc = {{"scenario", s.name},
              {"gamma_schedule", gammas},
              {"lambda", weights_to_json(s.loss.lambda)},
              {"beta", s.loss.beta ? json(*s.loss.beta) : json(nullptr)},
              {"rounds", s.rounds},
              {"k", s.k},
              {"p", s.p},
              {"lr", s.lr},
              {"momentum", s.momentum},
              {"seeds", s.seeds},
              {"hidden", config.hidden},
              {"batch_size", config.batch_size},
              {"score_mode", to_string(config.score_mode)},
              {"prune_scope", to_string(config.scope)},
              {"gamma_warmup", to_string(config.gamma_warmup)},
              {"data", data}};
  return doc;
}

ExperimentConfig config_from_json(const json& input, ExperimentConfig base) {
  const json& doc = input.contains("config") ? input.at("config") : input;
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  ExperimentConfig c = std::move(base);
  try {
    std::string name = c.scenario.name;
    if (doc.contains("scenario")) name = doc.at("scenario").get<std::string>();
    else if (doc.contains("preset")) name = doc.at("preset").get<std::string>();

    if (name == "custom") {
      for (const char* key : {"gamma_schedule", "lambda", "rounds", "k", "p", "lr", "momentum", "seeds"}) {
        if (!doc.contains(key)) {
          throw ValidationError(fmt::format("custom scenario must set '{}'", key));
        }
      }
      c.scenario.name = "custom";
    } else if (doc.contains("scenario") || doc.contains("preset")) {
      const auto seeds = c.scenario.seeds;
      c.scenario = preset(name);
      c.scenario.seeds = seeds;
    }

    auto& s = c.scenario;
    if (doc.contains("gamma_schedule")) {
      s.loss.gamma_schedule.clear();
      for (const auto& g : doc.at("gamma_schedule")) s.loss.gamma_schedule.push_back(weights_from_json(g));
    }
    if (doc.contains("lambda")) s.loss.lambda = weights_from_json(doc.at("lambda"));
    if (doc.contains("beta")) {
      s.loss.beta = doc.at("beta").is_null() ? std::nullopt
                                              : std::optional<double>(doc.at("beta").get<double>());
    }
    s.rounds = doc.value("rounds", s.rounds);
    s.k = doc.value("k", s.k);
    s.p = doc.value("p", s.p);
    s.lr = doc.value("lr", s.lr);
    s.momentum = doc.value("momentum", s.momentum);
    if (doc.contains("seeds")) s.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    if (doc.contains("seed")) s.seeds = {doc.at("seed").get<std::uint64_t>()};
    if (doc.contains("hidden")) c.hidden = doc.at("hidden").get<std::vector<int>>();
    c.batch_size = doc.value("batch_size", c.batch_size);
    if (doc.contains("score_mode")) {
      c.score_mode = enum_from_string(doc.at("score_mode").get<std::string>(),
                                      {ScoreMode::magnitude_increase, ScoreMode::signed_difference},
                                      "score_mode");
    }
    if (doc.contains("prune_scope")) {
      c.scope = enum_from_string(doc.at("prune_scope").get<std::string>(),
                                 {PruneScope::global, PruneScope::per_layer}, "prune_scope");
    }
    if (doc.contains("gamma_warmup")) {
      c.gamma_warmup = enum_from_string(doc.at("gamma_warmup").get<std::string>(),
                                        {GammaWarmup::first_round, GammaWarmup::first_epoch},
                                        "gamma_warmup");
    }
    if (doc.contains("data")) {
      const auto& d = doc.at("data");
      auto& data = c.data;
      if (d.contains("source")) {
        const auto src = d.at("source").get<std::string>();
        if (src == "gaussians") data.source = DataConfig::Source::gaussians;
        else if (src == "csv") data.source = DataConfig::Source::csv;
        else throw ValidationError(fmt::format("unknown data source '{}'", src));
      }
      if (d.contains("csv")) {
        data.csv_path = d.at("csv").get<std::string>();
        if (!d.contains("source")) data.source = DataConfig::Source::csv;
      }
      data.n_pos = d.value("n_pos", data.n_pos);
      data.n_neg = d.value("n_neg", data.n_neg);
      data.dim = d.value("dim", data.dim);
      data.separation = d.value("separation", data.separation);
      data.spread = d.value("spread", data.spread);
      if (d.contains("split")) {
        const auto f = d.at("split").get<std::vector<double>>();
        if (f.size() != 3) throw ValidationError("split needs three fractions");
        data.split.train = f[0];
        data.split.val = f[1];
        data.split.test = f[2];
      }
      data.split.stratified = d.value("stratified", data.split.stratified);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FilesystemError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

std::uint64_t data_seed(std::uint64_t run_seed) { return derive_seed(run_seed, 1); }
std::uint64_t split_seed(std::uint64_t run_seed) { return derive_seed(run_seed, 2); }
std::uint64_t network_seed(std::uint64_t run_seed) { return derive_seed(run_seed, 3); }

}  // namespace cdprune
