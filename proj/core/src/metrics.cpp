// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/metrics.hpp"

#include <vector>

#include "clozefit/common.hpp"
#include "json.hpp"

namespace clozefit {
namespace {

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw Error("prediction and gold counts differ");
  if (a == 0) throw Error("no predictions to score");
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp == 0) return 0.0;
  const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * p * r / (p + r);
}

}  // namespace

double accuracy(std::span<const std::string> preds, std::span<const std::string> golds) {
  check_sizes(preds.size(), golds.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == golds[i];
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double macro_f1(std::span<const std::string> preds, std::span<const std::string> golds,
                std::span<const std::string> labels) {
  check_sizes(preds.size(), golds.size());
  if (labels.empty()) throw Error("macro_f1 needs a label set");
  double sum = 0.0;
  for (const auto& c : labels) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool p = preds[i] == c;
      const bool g = golds[i] == c;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
    sum += f1(tp, fp, fn);
  }
  return sum / static_cast<double>(labels.size());
}

MultircScores multirc_em_f1a(std::span<const AnswerJudgment> judgments) {
  if (judgments.empty()) throw Error("no predictions to score");
  std::map<std::string, bool> all_right;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& j : judgments) {
    auto [it, inserted] = all_right.try_emplace(j.question, true);
    if (j.pred != j.gold) it->second = false;
    tp += j.pred && j.gold;
    fp += j.pred && !j.gold;
    fn += !j.pred && j.gold;
  }
  std::size_t exact = 0;
  for (const auto& [q, ok] : all_right) exact += ok;
  MultircScores s;
  s.n_questions = all_right.size();
  s.em = static_cast<double>(exact) / static_cast<double>(all_right.size());
  s.f1a = (tp + fp + fn == 0) ? 1.0 : f1(tp, fp, fn);
  return s;
}

double EvalReport::primary_value() const {
  auto it = metrics.find(primary);
  if (it == metrics.end()) throw Error("report has no metric '" + primary + "'");
  return it->second;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : metrics) j[k] = v;
  j["n_examples"] = n_examples;
  if (n_questions > 0) j["n_questions"] = n_questions;
  j["primary"] = primary;
  return j.dump();
}

EvalReport EvalReport::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("malformed evaluation report");
  EvalReport r;
  for (const auto& [k, v] : j.items()) {
    if (k == "n_examples") {
      r.n_examples = v.get<std::size_t>();
    } else if (k == "n_questions") {
      r.n_questions = v.get<std::size_t>();
    } else if (k == "primary") {
      r.primary = v.get<std::string>();
    } else if (v.is_number()) {
      r.metrics[k] = v.get<double>();
    }
  }
  return r;
}

}  // namespace clozefit
