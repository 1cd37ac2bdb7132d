// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "clozefit/pvp.hpp"
#include "clozefit/rng.hpp"

namespace clozefit {

enum class SyntheticKind { kKeywordEntailment, kNegationFlip, kPairedWordSense };

SyntheticKind parse_synthetic_kind(std::string_view name);
std::string_view synthetic_kind_name(SyntheticKind kind);

/// keyword-entailment and negation-flip produce RTE records,
/// paired-word-sense produces WiC records.
TaskId synthetic_task(SyntheticKind kind);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kKeywordEntailment;
  /// Seeds the made-up word pool (trigger words, fillers, sense markers).
  std::uint64_t vocab_seed = 7;
  int n_train = 32;
  int n_dev = 100;
  int n_test = 200;
  /// Fraction of training labels flipped (equally from each class).
  double noise = 0.0;

  void validate() const;
};

struct SyntheticData {
  TaskId task = TaskId::kRte;
  std::vector<TaskExample> train;
  std::vector<TaskExample> dev;
  std::vector<TaskExample> test;
};

/// Word pool shared by every split of one spec.
struct SyntheticLexicon {
  /// keyword-entailment: its presence in the premise means entailment.
  std::string trigger;
  std::vector<std::string> fillers;
  /// paired-word-sense: pivot words, each with two sets of sense markers.
  std::vector<std::string> pivots;
  std::vector<std::vector<std::string>> sense_markers;  // 2 per pivot, pivot-major
};

SyntheticLexicon synthetic_lexicon(std::uint64_t vocab_seed);

/// Train labels are balanced exactly (the odd example goes to the first
/// label); dev and test alternate labels before shuffling.
SyntheticData generate(const SyntheticSpec& spec, Rng& rng);

}  // namespace clozefit
