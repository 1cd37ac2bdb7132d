// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "clozefit/checkpoint.hpp"
#include "json.hpp"

namespace clozefit {
namespace fs = std::filesystem;
namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void prepare_fresh_dir(const fs::path& dir) {
  if (dir.empty()) throw Error("no output directory given (--out or 'out')");
  if (fs::exists(dir) && !(fs::is_directory(dir) && fs::is_empty(dir))) {
    throw Error("output directory " + dir.string() + " already exists and is not empty");
  }
  fs::create_directories(dir);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct LoadedRun {
  RunConfig config;
  TaskId task;
  Vocabulary vocab;
  Parameters params;
  std::vector<PVP> pvps;
};

LoadedRun load_run(const fs::path& dir) {
  const RunPaths paths{dir};
  if (!fs::is_directory(dir)) throw Error("no run directory " + dir.string());
  auto config = RunConfig::load(paths.config());
  const auto task = config.task();
  auto vocab = Vocabulary::load(paths.vocab());
  auto params = load_checkpoint(paths.checkpoint(), config.model_config(vocab.size()));
  auto pvps = load_pvps(config, task);
  return {std::move(config), task, std::move(vocab), std::move(params), std::move(pvps)};
}

std::vector<TaskExample> eval_split(const LoadedRun& run, const std::optional<fs::path>& data) {
  if (data) return load_task_examples(*data, run.task);
  auto all = load_task_data(run.config);
  if (!all.test.empty()) return all.test;
  return all.dev;
}

}  // namespace

TaskData load_task_data(const RunConfig& config) {
  TaskData data;
  data.task = config.task();
  if (const auto spec = config.synthetic()) {
    Rng rng(static_cast<std::uint64_t>(config.get_int("synthetic.seed")));
    auto gen = generate(*spec, rng);
    data.train = std::move(gen.train);
    data.dev = std::move(gen.dev);
    data.test = std::move(gen.test);
    return data;
  }
  data.train = load_task_examples(config.get("data.train"), data.task);
  data.dev = load_task_examples(config.get("data.dev"), data.task);
  if (!config.get("data.test").empty()) {
    data.test = load_task_examples(config.get("data.test"), data.task);
  }
  return data;
}

std::vector<PVP> load_pvps(const RunConfig& config, TaskId task) {
  const auto& file = config.get("pvp.file");
  if (file.empty()) return builtin_pvps(task);
  return load_pvp_file(file, task);
}

Vocabulary build_task_vocabulary(std::span<const PVP> pvps, const TaskData& data, int min_count) {
  std::vector<std::string> corpus = pvp_corpus(pvps);
  for (const auto* split : {&data.train, &data.dev, &data.test}) {
    for (const auto& ex : *split) {
      for (const auto& [name, value] : ex.fields) corpus.push_back(value);
    }
  }
  return Vocabulary::build(corpus, min_count);
}

TrainOutcome cmd_train(const RunConfig& config, const fs::path& out_dir) {
  config.validate();
  const auto train_cfg = config.train_config();
  const auto data = load_task_data(config);
  const auto pvps = load_pvps(config, data.task);
  const auto vocab =
      build_task_vocabulary(pvps, data, static_cast<int>(config.get_int("vocab.min_count")));
  const auto model_cfg = config.model_config(vocab.size());

  TrainOutcome out;
  out.paths.dir = out_dir;
  prepare_fresh_dir(out_dir);
  fs::create_directories(out_dir / "checkpoints");
  RunConfig echoed = config;
  echoed.set("out", out_dir.string());
  write_text(out.paths.config(), echoed.to_text());
  vocab.save(out.paths.vocab());

  auto result = train(train_cfg, pvps, data.train, data.dev, vocab, init_parameters(model_cfg));
  save_checkpoint(result.best, out.paths.checkpoint());
  write_text(out.paths.history(), result.history.to_jsonl());

  out.history = result.history;
  out.dev = evaluate(result.best, train_cfg, pvps, data.dev, vocab).report;
  write_text(out.paths.eval_dev(), out.dev.to_json() + "\n");
  if (!data.test.empty()) {
    out.test = evaluate(result.best, train_cfg, pvps, data.test, vocab).report;
    write_text(out.paths.eval_test(), out.test->to_json() + "\n");
  }
  nlohmann::ordered_json summary;
  summary["best_batch"] = result.history.best_batch;
  summary["best_metric"] = result.history.best_metric;
  summary["checkpoint_hash"] = hex64(result.history.best_hash);
  summary["history_hash"] = hex64(result.history.hash());
  write_text(out.paths.summary(), summary.dump() + "\n");
  return out;
}

EvalReport cmd_eval(const fs::path& run_dir, const std::optional<fs::path>& data) {
  const auto run = load_run(run_dir);
  const auto examples = eval_split(run, data);
  return evaluate(run.params, run.config.train_config(), run.pvps, examples, run.vocab).report;
}

std::string AblationRow::to_json() const {
  nlohmann::ordered_json j;
  j["arm"] = arm;
  j["objective"] = objective;
  j["mask_kind"] = mask_kind;
  j["mask_ratio"] = mask_ratio;
  j["best_batch"] = best_batch;
  j["dev_metric"] = dev_metric;
  if (test_metric) j["test_metric"] = *test_metric;
  j["history_hash"] = hex64(history_hash);
  return j.dump();
}

AblationResult cmd_ablate(const RunConfig& config, const fs::path& out_dir) {
  config.validate();
  prepare_fresh_dir(out_dir);
  write_text(out_dir / "config.txt", config.to_text());

  AblationResult result;
  std::string log;
  auto run_arm = [&](RunConfig arm_cfg, std::string name) {
    const auto outcome = cmd_train(arm_cfg, out_dir / name);
    AblationRow row;
    row.arm = std::move(name);
    row.objective = arm_cfg.get("objective");
    row.mask_kind = arm_cfg.get("mask.kind");
    row.mask_ratio = arm_cfg.get_double("mask.ratio");
    row.best_batch = outcome.history.best_batch;
    row.dev_metric = outcome.history.best_metric;
    if (outcome.test) row.test_metric = outcome.test->primary_value();
    row.history_hash = outcome.history.hash();
    log += row.to_json() + "\n";
    return row;
  };

  for (const auto& objective : config.get_list("ablate.arms")) {
    RunConfig arm = config;
    arm.set("objective", objective);
    result.arms.push_back(run_arm(arm, "arm_" + objective));
  }
  for (const auto& kind : config.get_list("ablate.mask_kinds")) {
    for (const auto& ratio : config.get_list("ablate.mask_ratios")) {
      RunConfig arm = config;
      arm.set("mask.kind", kind);
      arm.set("mask.ratio", ratio);
      result.mask_grid.push_back(run_arm(arm, "mask_" + kind + "_" + ratio));
    }
  }
  write_text(out_dir / "ablation.jsonl", log);
  return result;
}

EvalReport cmd_ensemble(std::span<const fs::path> run_dirs, const std::optional<fs::path>& data) {
  if (run_dirs.empty()) throw Error("ensemble needs at least one run directory");
  std::vector<LoadedRun> runs;
  for (const auto& d : run_dirs) runs.push_back(load_run(d));
  const auto& first = runs.front();
  for (const auto& r : runs) {
    if (r.task != first.task) throw Error("ensemble runs are for different tasks");
    if (!(r.vocab == first.vocab)) throw Error("ensemble runs use different vocabularies");
    if (!(r.params.config.vocab_size == first.params.config.vocab_size &&
          r.params.config.d_model == first.params.config.d_model &&
          r.params.config.n_layers == first.params.config.n_layers &&
          r.params.config.n_heads == first.params.config.n_heads &&
          r.params.config.d_ff == first.params.config.d_ff &&
          r.params.config.max_len == first.params.config.max_len)) {
      throw Error("ensemble runs have different model shapes");
    }
  }
  std::vector<Model> models;
  for (const auto& r : runs) {
    auto p = r.params;
    p.config.seed = first.params.config.seed;
    models.emplace_back(p);
  }
  std::vector<const Model*> ptrs;
  for (const auto& m : models) ptrs.push_back(&m);
  const auto examples = eval_split(first, data);
  return evaluate(ptrs, first.config.train_config(), first.pvps, examples, first.vocab).report;
}

void cmd_generate(const RunConfig& config, const fs::path& out_dir) {
  if (!config.synthetic()) throw Error("generate needs synthetic.kind");
  const auto data = load_task_data(config);
  if (out_dir.empty()) throw Error("no output directory given (--out or 'out')");
  fs::create_directories(out_dir);
  save_task_examples(out_dir / "train.jsonl", data.train);
  save_task_examples(out_dir / "dev.jsonl", data.dev);
  save_task_examples(out_dir / "test.jsonl", data.test);
}

}  // namespace clozefit
