#include "cdprune/cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cdprune/data.hpp"
#include "cdprune/errors.hpp"
#include "cdprune/report.hpp"
#include "cdprune/runner.hpp"
#include "cdprune/scenario.hpp"

namespace cdprune {

namespace {

struct RunFlags {
  std::optional<std::string> preset;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<int> rounds, k;
  std::optional<double> p, lr, momentum;
  std::optional<std::vector<int>> hidden;
  std::optional<std::size_t> batch_size;
  std::optional<std::vector<double>> lambda;
  std::optional<std::string> score_mode, prune_scope, gamma_warmup;
  std::optional<std::size_t> n_pos, n_neg, dim;
  std::optional<double> separation, spread;
  std::optional<std::string> data_csv;
};

struct GenFlags {
  std::size_t n_pos = 400, n_neg = 2000, dim = 2;
  double separation = 2.0, spread = 1.0;
};

// CLI flags override the config file, which overrides the preset.
ExperimentConfig build_config(const std::optional<std::string>& config_path,
                              const std::optional<std::uint64_t>& seed, const RunFlags& f) {
  ExperimentConfig c;
  if (config_path) c = load_config(*config_path);
  nlohmann::json overrides = nlohmann::json::object();
  if (f.preset) overrides["scenario"] = *f.preset;
  if (f.rounds) overrides["rounds"] = *f.rounds;
  if (f.k) overrides["k"] = *f.k;
  if (f.p) overrides["p"] = *f.p;
  if (f.lr) overrides["lr"] = *f.lr;
  if (f.momentum) overrides["momentum"] = *f.momentum;
  if (f.hidden) overrides["hidden"] = *f.hidden;
  if (f.batch_size) overrides["batch_size"] = *f.batch_size;
  if (f.score_mode) overrides["score_mode"] = *f.score_mode;
  if (f.prune_scope) overrides["prune_scope"] = *f.prune_scope;
  if (f.gamma_warmup) overrides["gamma_warmup"] = *f.gamma_warmup;
  if (f.lambda) {
    if (f.lambda->size() == 1) overrides["lambda"] = (*f.lambda)[0];
    else if (f.lambda->size() == 2) overrides["lambda"] = *f.lambda;
    else throw ValidationError("--lambda takes one or two values");
  }
  if (f.seeds) overrides["seeds"] = *f.seeds;
  if (seed) overrides["seed"] = *seed;
  nlohmann::json data = nlohmann::json::object();
  if (f.n_pos) data["n_pos"] = *f.n_pos;
  if (f.n_neg) data["n_neg"] = *f.n_neg;
  if (f.dim) data["dim"] = *f.dim;
  if (f.separation) data["separation"] = *f.separation;
  if (f.spread) data["spread"] = *f.spread;
  if (f.data_csv) data["csv"] = *f.data_csv;
  if (!data.empty()) overrides["data"] = data;
  c = config_from_json(overrides, std::move(c));
  c.validate();
  return c;
}

void print_presets(std::ostream& out) {
  for (const auto& name : preset_names()) {
    ExperimentConfig c;
    c.scenario = preset(name);
    const auto j = to_json(c);
    out << fmt::format("{:<6} gamma_schedule={} lambda={} rounds={} k={} p={} lr={} momentum={}\n",
                       name, j["gamma_schedule"].dump(), j["lambda"].dump(), c.scenario.rounds,
                       c.scenario.k, c.scenario.p, c.scenario.lr, c.scenario.momentum);
  }
}

}  // namespace

int cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Class-dependent lottery-ticket pruning experiments", "cdprune"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<std::string> config_path;
  app.add_option("--seed", seed, "Run seed (replaces the seed list)");
  app.add_option("--out", out_path, "Output file or directory");
  app.add_option("--config", config_path, "JSON config file or run.json manifest");

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic imbalanced Gaussian dataset as CSV");
  GenFlags g;
  gen->add_option("--n-pos", g.n_pos, "Positive (minority) samples")->capture_default_str();
  gen->add_option("--n-neg", g.n_neg, "Negative (majority) samples")->capture_default_str();
  gen->add_option("--dim", g.dim, "Feature dimension")->capture_default_str();
  gen->add_option("--separation", g.separation, "Distance between class means")->capture_default_str();
  gen->add_option("--spread", g.spread, "Per-feature standard deviation")->capture_default_str();

  auto* runc = app.add_subcommand("run", "Run a scenario and write results.csv, run.json and checkpoints");
  RunFlags f;
  runc->add_option("--preset", f.preset, "red, blue, black, green or custom");
  runc->add_option("--seeds", f.seeds, "Seed list")->delimiter(',');
  runc->add_option("--rounds", f.rounds, "Rounds including the dense round");
  runc->add_option("--k", f.k, "Optimizer steps per round");
  runc->add_option("--p", f.p, "Percent of surviving weights pruned per round");
  runc->add_option("--lr", f.lr, "Learning rate");
  runc->add_option("--momentum", f.momentum, "SGD momentum");
  runc->add_option("--hidden", f.hidden, "Hidden layer sizes")->delimiter(',');
  runc->add_option("--batch-size", f.batch_size, "Mini-batch size, 0 = full batch");
  runc->add_option("--lambda", f.lambda, "Hinge weight for both classes, or neg,pos")->delimiter(',');
  runc->add_option("--score-mode", f.score_mode, "magnitude_increase or signed_difference");
  runc->add_option("--prune-scope", f.prune_scope, "global or per_layer");
  runc->add_option("--gamma-warmup", f.gamma_warmup, "first_round or first_epoch");
  runc->add_option("--n-pos", f.n_pos, "Synthetic positives");
  runc->add_option("--n-neg", f.n_neg, "Synthetic negatives");
  runc->add_option("--dim", f.dim, "Synthetic feature dimension");
  runc->add_option("--separation", f.separation, "Synthetic class separation");
  runc->add_option("--spread", f.spread, "Synthetic class spread");
  runc->add_option("--data-csv", f.data_csv, "Load data from CSV instead of generating it");

  auto* rep = app.add_subcommand("report", "Render AUC/accuracy/FNR/FPR curves from results CSVs");
  std::vector<std::string> csvs;
  std::string split = "test";
  rep->add_option("csv", csvs, "results.csv files")->required();
  rep->add_option("--split", split, "val or test")->capture_default_str();

  auto* pre = app.add_subcommand("presets", "List scenario presets and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*pre) {
      print_presets(out);
      return kExitOk;
    }
    if (*gen) {
      GaussianSpec spec{g.n_pos, g.n_neg, g.dim, g.separation, g.spread, seed.value_or(0)};
      const auto ds = gen_gaussians(spec);
      const std::filesystem::path path = out_path.value_or("data.csv");
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      write_csv(ds, path);
      out << fmt::format("wrote {} rows ({} positive, {} negative) to {}\n", ds.size(), ds.n_pos,
                         ds.n_neg, path.string());
      return kExitOk;
    }
    if (*runc) {
      const auto config = build_config(config_path, seed, f);
      const std::filesystem::path dir = out_path.value_or("runs/" + config.scenario.name);
      const auto outcome = run(config, dir);
      out << fmt::format("{}: {} rows written to {}\n", config.scenario.name,
                         outcome.table.rows.size(), (dir / "results.csv").string());
      for (const auto& s : outcome.seeds) {
        if (s.status != RunStatus::ok) {
          err << fmt::format("seed {}: {} ({}); partial results kept\n", s.seed,
                             to_string(s.status), s.error);
        }
      }
      return outcome.ok() ? kExitOk : kExitPartial;
    }
    if (*rep) {
      std::vector<std::filesystem::path> paths(csvs.begin(), csvs.end());
      const auto written = report(paths, out_path.value_or("figs"), split);
      for (const auto& p : written) out << p.string() << '\n';
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace cdprune
