// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace clozefit {
namespace {

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error("empty logit row");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (auto& x : p) x /= sum;
  return p;
}

void check_token(std::span<const double> logits, TokenId token) {
  if (token < 0 || static_cast<std::size_t>(token) >= logits.size()) {
    throw Error("token id " + std::to_string(token) + " outside the logit row");
  }
}

void check_label(std::size_t true_label, std::size_t count) {
  if (true_label >= count) throw Error("true label index out of range");
}

void check_distinct(std::span<const TokenId> candidates) {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (candidates[i] == candidates[j]) throw Error("duplicate candidate token ids");
    }
  }
}

bool clamped(double q) { return q < kProbEps || q > 1.0 - kProbEps; }
double clamp_prob(double q) { return std::clamp(q, kProbEps, 1.0 - kProbEps); }

/// BCE(q_z, target) for one row; adds its logit gradient into `grad`.
double bce_term(const std::vector<double>& p, TokenId z, bool target, std::span<double> grad) {
  const double qz = p[static_cast<std::size_t>(z)];
  const double q = clamp_prob(qz);
  const double loss = target ? -std::log(q) : -std::log1p(-q);
  if (!grad.empty() && !clamped(qz)) {
    if (target) {
      for (std::size_t v = 0; v < p.size(); ++v) grad[v] += p[v];
      grad[static_cast<std::size_t>(z)] -= 1.0;
    } else {
      const double f = qz / (1.0 - qz);
      for (std::size_t v = 0; v < p.size(); ++v) grad[v] -= f * p[v];
      grad[static_cast<std::size_t>(z)] += f;
    }
  }
  return loss;
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::span<double> grad_row(std::span<const GradRows> grads, std::size_t label, std::size_t i) {
  if (grads.empty()) return {};
  return grads[label].at(i);
}

}  // namespace

double vocab_prob(std::span<const double> logits, TokenId token) {
  check_token(logits, token);
  return clamp_prob(softmax(logits)[static_cast<std::size_t>(token)]);
}

double pet_ce_loss(std::span<const double> logits, std::span<const TokenId> candidates,
                   std::size_t true_label, std::span<double> grad) {
  check_label(true_label, candidates.size());
  check_distinct(candidates);
  std::vector<double> sub;
  for (auto t : candidates) {
    check_token(logits, t);
    sub.push_back(logits[static_cast<std::size_t>(t)]);
  }
  const auto p = softmax(sub);
  const double mx = *std::max_element(sub.begin(), sub.end());
  double lse = 0.0;
  for (auto x : sub) lse += std::exp(x - mx);
  const double loss = mx + std::log(lse) - sub[true_label];
  if (!grad.empty()) {
    for (std::size_t y = 0; y < candidates.size(); ++y) {
      grad[static_cast<std::size_t>(candidates[y])] += p[y] - (y == true_label ? 1.0 : 0.0);
    }
  }
  return loss;
}

double decoupled_label_loss(std::span<const double> logits, std::span<const TokenId> candidates,
                            std::size_t true_label, std::span<double> grad) {
  check_label(true_label, candidates.size());
  check_distinct(candidates);
  for (auto t : candidates) check_token(logits, t);
  const auto p = softmax(logits);
  double loss = 0.0;
  for (std::size_t y = 0; y < candidates.size(); ++y) {
    loss += bce_term(p, candidates[y], y == true_label, grad);
  }
  return loss;
}

std::vector<std::vector<bool>> distinguishing_positions(
    std::span<const std::vector<TokenId>> labels) {
  std::vector<std::vector<bool>> keep;
  for (const auto& l : labels) keep.emplace_back(l.size(), true);
  if (labels.size() < 2) return keep;
  const std::size_t len = labels[0].size();
  if (!std::all_of(labels.begin(), labels.end(), [&](const auto& l) { return l.size() == len; })) {
    return keep;
  }
  for (std::size_t i = 0; i < len; ++i) {
    const bool common = std::all_of(labels.begin(), labels.end(),
                                    [&](const auto& l) { return l[i] == labels[0][i]; });
    if (common) {
      for (auto& k : keep) k[i] = false;
    }
  }
  for (const auto& k : keep) {
    if (std::none_of(k.begin(), k.end(), [](bool b) { return b; })) {
      throw Error("labels indistinguishable");
    }
  }
  return keep;
}

double decoupled_label_loss_multi(std::span<const LabelRendering> renderings,
                                  std::size_t true_label, std::span<const GradRows> grads) {
  check_label(true_label, renderings.size());
  std::vector<std::vector<TokenId>> labels;
  for (const auto& r : renderings) {
    if (r.rows.size() != r.tokens.size() || r.tokens.empty()) {
      throw Error("rendering mask count does not match its label length");
    }
    labels.push_back(r.tokens);
  }
  const auto keep = distinguishing_positions(labels);
  double loss = 0.0;
  for (std::size_t y = 0; y < renderings.size(); ++y) {
    for (std::size_t i = 0; i < labels[y].size(); ++i) {
      if (!keep[y][i]) continue;
      const auto& row = renderings[y].rows[i];
      check_token(row, labels[y][i]);
      loss += bce_term(softmax(row), labels[y][i], y == true_label, grad_row(grads, y, i));
    }
  }
  return loss;
}

double label_conditioned_mlm_loss(std::span<const LogitRows> rows_per_label,
                                  std::span<const TokenId> originals, std::size_t true_label,
                                  bool positive_only, std::span<const GradRows> grads) {
  check_label(true_label, rows_per_label.size());
  if (originals.empty()) throw Error("mask plan is empty");
  double loss = 0.0;
  for (std::size_t y = 0; y < rows_per_label.size(); ++y) {
    const bool positive = y == true_label;
    if (!positive && positive_only) continue;
    if (rows_per_label[y].size() != originals.size()) {
      throw Error("conditioned pass does not cover every planned position");
    }
    for (std::size_t i = 0; i < originals.size(); ++i) {
      const auto& row = rows_per_label[y][i];
      check_token(row, originals[i]);
      loss += bce_term(softmax(row), originals[i], positive, grad_row(grads, y, i));
    }
  }
  return loss;
}

double rtd_loss(std::span<const double> scores, std::size_t true_label, std::span<double> grad) {
  check_label(true_label, scores.size());
  double loss = 0.0;
  for (std::size_t y = 0; y < scores.size(); ++y) {
    const bool positive = y == true_label;
    loss += positive ? softplus(-scores[y]) : softplus(scores[y]);
    if (!grad.empty()) grad[y] += sigmoid(scores[y]) - (positive ? 1.0 : 0.0);
  }
  return loss;
}

LossBreakdown adapet_loss(double l_d, double l_m, const LossWeights& weights) {
  return {l_d, l_m, weights.label * l_d + weights.mlm * l_m};
}

std::vector<double> label_scores(std::span<const double> logits,
                                 std::span<const TokenId> candidates) {
  const auto p = softmax(logits);
  std::vector<double> out;
  for (auto t : candidates) {
    check_token(logits, t);
    out.push_back(clamp_prob(p[static_cast<std::size_t>(t)]));
  }
  return out;
}

std::vector<double> label_scores(std::span<const LabelRendering> renderings) {
  std::vector<double> out;
  for (const auto& r : renderings) {
    if (r.rows.size() != r.tokens.size() || r.tokens.empty()) {
      throw Error("rendering mask count does not match its label length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
      check_token(r.rows[i], r.tokens[i]);
      sum += std::log(clamp_prob(softmax(r.rows[i])[static_cast<std::size_t>(r.tokens[i])]));
    }
    out.push_back(sum / static_cast<double>(r.tokens.size()));
  }
  return out;
}

std::size_t predict_label(std::span<const double> scores) {
  if (scores.empty()) throw Error("no labels to predict from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace clozefit
