// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clozefit/run_config.hpp"

namespace clozefit {

struct TaskData {
  TaskId task = TaskId::kRte;
  std::vector<TaskExample> train;
  std::vector<TaskExample> dev;
  std::vector<TaskExample> test;
};

/// Reads the data files, or generates the synthetic task, named by `config`.
TaskData load_task_data(const RunConfig& config);

/// Built-in catalog, or the PVPs of pvp.file when set.
std::vector<PVP> load_pvps(const RunConfig& config, TaskId task);

/// Vocabulary over the PVP text and the field text of every split.
Vocabulary build_task_vocabulary(std::span<const PVP> pvps, const TaskData& data, int min_count);

/// Files of a run directory.
struct RunPaths {
  std::filesystem::path dir;

  std::filesystem::path config() const { return dir / "config.txt"; }
  std::filesystem::path vocab() const { return dir / "vocab.txt"; }
  std::filesystem::path checkpoint() const { return dir / "checkpoints" / "best.ckpt"; }
  std::filesystem::path history() const { return dir / "history.jsonl"; }
  std::filesystem::path summary() const { return dir / "run.json"; }
  std::filesystem::path eval_dev() const { return dir / "eval_dev.json"; }
  std::filesystem::path eval_test() const { return dir / "eval_test.json"; }
};

struct TrainOutcome {
  RunPaths paths;
  RunHistory history;
  EvalReport dev;
  std::optional<EvalReport> test;
};

/// Trains per `config` into a fresh run directory `out_dir` (which must not
/// exist or be empty).
TrainOutcome cmd_train(const RunConfig& config, const std::filesystem::path& out_dir);

/// Evaluates a run's best checkpoint on `data` (or on the run's own test
/// split, falling back to dev). Reads the run directory only.
EvalReport cmd_eval(const std::filesystem::path& run_dir,
                    const std::optional<std::filesystem::path>& data = std::nullopt);

struct AblationRow {
  std::string arm;
  std::string objective;
  std::string mask_kind;
  double mask_ratio = 0.0;
  int best_batch = 0;
  double dev_metric = 0.0;
  std::optional<double> test_metric;
  std::uint64_t history_hash = 0;

  std::string to_json() const;
};

struct AblationResult {
  std::vector<AblationRow> arms;
  std::vector<AblationRow> mask_grid;
};

/// Runs every objective in ablate.arms, then every mask.kind x mask.ratio
/// pair of the grid, all with the same seed. Rows are also written to
/// `out_dir`/ablation.jsonl.
AblationResult cmd_ablate(const RunConfig& config, const std::filesystem::path& out_dir);

/// Averages the logits of every run's best checkpoint. All runs must share
/// the vocabulary and model config; patterns and objective come from the
/// first run.
EvalReport cmd_ensemble(std::span<const std::filesystem::path> run_dirs,
                        const std::optional<std::filesystem::path>& data = std::nullopt);

/// Writes train.jsonl, dev.jsonl and test.jsonl for the configured
/// synthetic task.
void cmd_generate(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace clozefit
