// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clozefit/masking.hpp"
#include "clozefit/metrics.hpp"
#include "clozefit/model.hpp"
#include "clozefit/objectives.hpp"
#include "clozefit/pvp.hpp"

namespace clozefit {

enum class Objective { kPet, kAdapet, kAdapetNoLc, kAdapetLcPosOnly, kRtd };

Objective parse_objective(std::string_view name);
std::string_view objective_name(Objective objective);

/// pet: label-softmax cross-entropy. adapet: decoupled label loss plus
/// label-conditioned MLM. adapet_no_lc drops the MLM term, adapet_lc_pos_only
/// keeps only its positive term. rtd: the detection head replaces the
/// decoupled label loss and also drives prediction.
bool uses_label_conditioning(Objective objective);

struct TrainConfig {
  double lr = 1e-5;
  double weight_decay = 1e-2;
  double warmup_frac = 0.1;
  int total_batches = 1000;
  int batch_size = 16;
  int eval_every = 100;
  std::uint64_t seed = 42;
  Objective objective = Objective::kAdapet;
  MaskScheme mask;
  int pattern_index = 1;
  /// Sample a pattern per batch instead of using pattern_index.
  bool mtmp = false;
  LossWeights weights;

  void validate() const;
};

struct ExampleLoss {
  double l_d = 0.0;
  double l_m = 0.0;
};

/// Loss of one labeled example under `pvp`; adds scale * d(loss)/d(params)
/// into `grads`. The mask plan (if any) is drawn from `rng`.
ExampleLoss accumulate_example(const Model& model, const TrainConfig& config, const PVP& pvp,
                               const TaskExample& example, const Vocabulary& vocab,
                               const TfidfScores* tfidf, Rng& rng, Gradients& grads,
                               double scale);

/// Mean of the models' logits at the instance's mask positions,
/// [|mask_positions|, vocab]. All models must share one config.
Matrix ensemble_logits(std::span<const Model* const> models, const ClozeInstance& instance);
Matrix ensemble_logits(std::span<const Parameters> models, const ClozeInstance& instance);

/// Per-label scores under one PVP, averaging the models' logits (or
/// detection-head logits when `rtd_head`). Adds the number of forward passes
/// to `*forward_passes` when given.
std::vector<double> score_example(std::span<const Model* const> models, const PVP& pvp,
                                  const TaskExample& example, const Vocabulary& vocab,
                                  bool rtd_head, std::size_t* forward_passes = nullptr);

struct Evaluation {
  EvalReport report;
  std::vector<std::string> predictions;
};

/// Predicts every example (scores averaged over all patterns when
/// config.mtmp) and computes the task's metrics.
Evaluation evaluate(std::span<const Model* const> models, const TrainConfig& config,
                    std::span<const PVP> pvps, std::span<const TaskExample> examples,
                    const Vocabulary& vocab);
Evaluation evaluate(const Parameters& params, const TrainConfig& config,
                    std::span<const PVP> pvps, std::span<const TaskExample> examples,
                    const Vocabulary& vocab);

struct EvalRecord {
  int batch = 0;
  double lr = 0.0;
  /// Per-example means over the batches since the previous record.
  double loss = 0.0;
  double l_d = 0.0;
  double l_m = 0.0;
  EvalReport dev;
};

struct RunHistory {
  std::vector<EvalRecord> evals;
  int best_batch = 0;
  double best_metric = 0.0;
  std::uint64_t best_hash = 0;

  /// One JSON object per line.
  std::string to_jsonl() const;
  std::uint64_t hash() const;
};

struct TrainResult {
  Parameters best;
  RunHistory history;
};

/// Fine-tunes `init` and keeps the parameters with the best primary dev
/// metric (ties keep the earlier checkpoint).
TrainResult train(const TrainConfig& config, std::span<const PVP> pvps,
                  std::span<const TaskExample> train_examples,
                  std::span<const TaskExample> dev_examples, const Vocabulary& vocab,
                  Parameters init, const std::function<void(const EvalRecord&)>& on_eval = {});

}  // namespace clozefit
