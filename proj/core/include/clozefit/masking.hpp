// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clozefit/pvp.hpp"
#include "clozefit/rng.hpp"

namespace clozefit {

enum class MaskKind { kFixed, kVariable, kTfidf };

MaskKind parse_mask_kind(std::string_view name);
std::string_view mask_kind_name(MaskKind kind);

struct MaskScheme {
  MaskKind kind = MaskKind::kVariable;
  double ratio = 0.105;

  /// Throws unless ratio is in (0, 0.5].
  void validate() const;
};

/// Context tokens hidden for one label-conditioning step.
struct MaskPlan {
  /// Ascending sequence positions.
  std::vector<std::size_t> positions;
  /// Token ids found at `positions` before masking.
  std::vector<TokenId> originals;
  /// Index of each position within the instance's context_positions.
  std::vector<std::size_t> context_indices;
};

/// max(1, floor(ratio * n)).
std::size_t max_masked(std::size_t context_size, double ratio);

/// fixed: exactly max_masked positions; variable: uniform count in
/// [1, max_masked]. Positions are drawn uniformly without replacement.
MaskPlan sample_mask_plan(const ClozeInstance& instance, const MaskScheme& scheme, Rng& rng);

/// Per-document token scores: tf(t, d) * ln(N / df(t)).
using TfidfScores = std::unordered_map<TokenId, double>;

std::vector<TfidfScores> tfidf_scores(std::span<const std::vector<TokenId>> documents);

/// Each example's field text (in schema order) forms one document.
std::vector<TfidfScores> tfidf_scores(std::span<const TaskExample> examples,
                                      const Vocabulary& vocab);

/// Count drawn as in the variable scheme; the positions are the highest
/// scoring context positions, ties broken by lower position.
MaskPlan sample_mask_plan_tfidf(const ClozeInstance& instance, const MaskScheme& scheme,
                                const TfidfScores& scores, Rng& rng);

/// Replaces every planned position with MASK.
void apply_plan(std::span<TokenId> ids, const MaskPlan& plan);
/// Restores the original tokens.
void revert_plan(std::span<TokenId> ids, const MaskPlan& plan);

/// Re-targets a plan onto another rendering of the same example by context
/// index. The target must hold the same original tokens there.
MaskPlan project_plan(const MaskPlan& plan, const ClozeInstance& target);

}  // namespace clozefit
