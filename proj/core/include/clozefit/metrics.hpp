// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace clozefit {

double accuracy(std::span<const std::string> preds, std::span<const std::string> golds);

/// Unweighted mean of per-class F1 over `labels`. A class with no true
/// positives (including one absent from both lists) scores 0.
double macro_f1(std::span<const std::string> preds, std::span<const std::string> golds,
                std::span<const std::string> labels);

/// One (question, candidate answer) judgment. `true` means "is a correct answer".
struct AnswerJudgment {
  std::string question;
  bool pred = false;
  bool gold = false;
};

struct MultircScores {
  double em = 0.0;
  double f1a = 0.0;
  std::size_t n_questions = 0;
};

/// EM: fraction of questions with every judgment right. F1a: micro F1 of the
/// positive class over all judgments (1 when there are no positives at all).
MultircScores multirc_em_f1a(std::span<const AnswerJudgment> judgments);

struct EvalReport {
  std::map<std::string, double> metrics;
  std::size_t n_examples = 0;
  std::size_t n_questions = 0;
  /// Name of the metric used for checkpoint selection.
  std::string primary;

  double primary_value() const;
  /// Flat JSON object: every metric plus the counts and the primary name.
  std::string to_json() const;
  static EvalReport from_json(std::string_view text);
};

}  // namespace clozefit
