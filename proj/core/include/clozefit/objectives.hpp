// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clozefit/common.hpp"

namespace clozefit {

// Every loss takes logits as vocabulary-length rows and, when gradient
// spans are supplied, adds d(loss)/d(logit) into them.

using LogitRows = std::vector<std::span<const double>>;
using GradRows = std::vector<std::span<double>>;

inline constexpr double kProbEps = 1e-7;

/// Softmax over the full vocabulary, evaluated at `token` and clamped to
/// [kProbEps, 1 - kProbEps].
double vocab_prob(std::span<const double> logits, TokenId token);

/// -ln q(y*) with q a softmax over the label tokens only.
double pet_ce_loss(std::span<const double> logits, std::span<const TokenId> candidates,
                   std::size_t true_label, std::span<double> grad = {});

/// -ln q(y*) - sum_{y != y*} ln(1 - q(y)), q from vocab_prob.
double decoupled_label_loss(std::span<const double> logits, std::span<const TokenId> candidates,
                            std::size_t true_label, std::span<double> grad = {});

/// One label's rendering: logits at each of its mask positions and the
/// verbalization tokens expected there.
struct LabelRendering {
  LogitRows rows;
  std::vector<TokenId> tokens;
};

/// keep[y][i] is false when every label carries the same token at index i.
/// Labels of differing lengths, or a single label, keep everything. Throws "labels indistinguishable" when a
/// label would lose all of its positions.
std::vector<std::vector<bool>> distinguishing_positions(
    std::span<const std::vector<TokenId>> labels);

/// Token-level decoupled loss over per-label renderings, skipping positions
/// shared by all labels.
double decoupled_label_loss_multi(std::span<const LabelRendering> renderings,
                                  std::size_t true_label, std::span<const GradRows> grads = {});

/// rows_per_label[y][p]: logits at the p-th planned position of the pass
/// conditioned on label y. Positive terms come from y*, negative terms from
/// every other label unless `positive_only`.
double label_conditioned_mlm_loss(std::span<const LogitRows> rows_per_label,
                                  std::span<const TokenId> originals, std::size_t true_label,
                                  bool positive_only = false,
                                  std::span<const GradRows> grads = {});

/// Binary cross-entropy of per-label detection logits: target 1 for y*, 0
/// for the rest, summed. `grad` receives d(loss)/d(score).
double rtd_loss(std::span<const double> scores, std::size_t true_label,
                std::span<double> grad = {});

struct LossWeights {
  double label = 1.0;
  double mlm = 1.0;
};

struct LossBreakdown {
  double l_d = 0.0;
  double l_m = 0.0;
  double total = 0.0;
};

LossBreakdown adapet_loss(double l_d, double l_m, const LossWeights& weights = {});

/// Per-label scores for single-token labels: clamped vocab_prob.
std::vector<double> label_scores(std::span<const double> logits,
                                 std::span<const TokenId> candidates);

/// Per-label scores for multi-token labels: mean ln q over each rendering.
std::vector<double> label_scores(std::span<const LabelRendering> renderings);

/// Index of the highest score; ties go to the lowest index.
std::size_t predict_label(std::span<const double> scores);

}  // namespace clozefit
