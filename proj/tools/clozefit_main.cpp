// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clozefit/experiment.hpp"
#include "json.hpp"

namespace {

using clozefit::RunConfig;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required) {
  auto* c = cmd->add_option("--config", o.config, "Config file of key = value lines");
  if (config_required) c->required();
  cmd->add_option("--set", o.overrides, "Override a config key (key=value), repeatable");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Random seed");
}

RunConfig resolve(const CommonOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig() : RunConfig::load(o.config);
  for (const auto& kv : o.overrides) cfg.apply_override(kv);
  if (o.seed) cfg.set("seed", std::to_string(*o.seed));
  if (!o.out.empty()) cfg.set("out", o.out);
  return cfg;
}

void print_error(const std::string& message) {
  nlohmann::json j;
  j["error"] = message;
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-shot cloze fine-tuning with pattern-verbalizer pairs"};
  app.require_subcommand(1);

  CommonOptions train_opts, ablate_opts, generate_opts;
  auto* train = app.add_subcommand("train", "Train a model and write a run directory");
  add_common(train, train_opts, false);

  auto* ablate = app.add_subcommand("ablate", "Run the objective arms and the mask-ratio grid");
  add_common(ablate, ablate_opts, false);

  auto* generate = app.add_subcommand("generate", "Write a synthetic task's data files");
  add_common(generate, generate_opts, false);

  std::string eval_run, eval_data;
  auto* eval = app.add_subcommand("eval", "Evaluate a run's best checkpoint");
  eval->add_option("run", eval_run, "Run directory")->required();
  eval->add_option("--data", eval_data, "Task file (default: the run's test split)");

  std::vector<std::string> ens_runs;
  std::string ens_data;
  auto* ensemble = app.add_subcommand("ensemble", "Evaluate the logit average of several runs");
  ensemble->add_option("runs", ens_runs, "Run directories")->required();
  ensemble->add_option("--data", ens_data, "Task file (default: the first run's test split)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(e.what());
    return 2;
  }

  try {
    if (*train) {
      const auto cfg = resolve(train_opts);
      const auto outcome = clozefit::cmd_train(cfg, cfg.get("out"));
      nlohmann::ordered_json j;
      j["run"] = outcome.paths.dir.string();
      j["best_batch"] = outcome.history.best_batch;
      j["dev"] = nlohmann::json::parse(outcome.dev.to_json());
      if (outcome.test) j["test"] = nlohmann::json::parse(outcome.test->to_json());
      std::cout << j.dump() << std::endl;
    } else if (*ablate) {
      const auto cfg = resolve(ablate_opts);
      const auto result = clozefit::cmd_ablate(cfg, cfg.get("out"));
      for (const auto& row : result.arms) std::cout << row.to_json() << "\n";
      for (const auto& row : result.mask_grid) std::cout << row.to_json() << "\n";
      std::cout.flush();
    } else if (*generate) {
      const auto cfg = resolve(generate_opts);
      clozefit::cmd_generate(cfg, cfg.get("out"));
      nlohmann::json j;
      j["out"] = cfg.get("out");
      std::cout << j.dump() << std::endl;
    } else if (*eval) {
      std::optional<fs::path> data;
      if (!eval_data.empty()) data = eval_data;
      std::cout << clozefit::cmd_eval(eval_run, data).to_json() << std::endl;
    } else if (*ensemble) {
      std::vector<fs::path> dirs(ens_runs.begin(), ens_runs.end());
      std::optional<fs::path> data;
      if (!ens_data.empty()) data = ens_data;
      std::cout << clozefit::cmd_ensemble(dirs, data).to_json() << std::endl;
    }
  } catch (const std::exception& e) {
    print_error(e.what());
    return 1;
  }
  return 0;
}
