// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace clozefit {
namespace {

std::size_t draw_count(std::size_t k_max, MaskKind kind, Rng& rng) {
  if (kind == MaskKind::kFixed) return k_max;
  return static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(k_max)));
}

MaskPlan plan_from_indices(const ClozeInstance& instance, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  MaskPlan plan;
  plan.context_indices = std::move(indices);
  for (auto ci : plan.context_indices) {
    const auto pos = instance.context_positions[ci];
    plan.positions.push_back(pos);
    plan.originals.push_back(instance.ids[pos]);
  }
  return plan;
}

void require_context(const ClozeInstance& instance) {
  if (instance.context_positions.empty()) throw Error("nothing to mask");
}

}  // namespace

MaskKind parse_mask_kind(std::string_view name) {
  if (name == "fixed") return MaskKind::kFixed;
  if (name == "variable") return MaskKind::kVariable;
  if (name == "tfidf") return MaskKind::kTfidf;
  throw Error("unknown mask kind '" + std::string(name) + "'");
}

std::string_view mask_kind_name(MaskKind kind) {
  switch (kind) {
    case MaskKind::kFixed: return "fixed";
    case MaskKind::kVariable: return "variable";
    case MaskKind::kTfidf: return "tfidf";
  }
  return "unknown";
}

void MaskScheme::validate() const {
  if (!(ratio > 0.0 && ratio <= 0.5)) {
    throw Error("mask ratio must be in (0, 0.5], got " + std::to_string(ratio));
  }
}

std::size_t max_masked(std::size_t context_size, double ratio) {
  const auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(context_size)));
  return std::max<std::size_t>(1, k);
}

MaskPlan sample_mask_plan(const ClozeInstance& instance, const MaskScheme& scheme, Rng& rng) {
  scheme.validate();
  if (scheme.kind == MaskKind::kTfidf) throw Error("tfidf masking needs token scores");
  require_context(instance);
  const auto n = instance.context_positions.size();
  const auto k = std::min(n, draw_count(max_masked(n, scheme.ratio), scheme.kind, rng));

  // Partial Fisher-Yates over context indices.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return plan_from_indices(instance, std::move(pool));
}

std::vector<TfidfScores> tfidf_scores(std::span<const std::vector<TokenId>> documents) {
  std::unordered_map<TokenId, std::size_t> df;
  for (const auto& doc : documents) {
    std::vector<TokenId> uniq(doc);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (auto t : uniq) ++df[t];
  }
  const auto n_docs = static_cast<double>(documents.size());
  std::vector<TfidfScores> out;
  out.reserve(documents.size());
  for (const auto& doc : documents) {
    std::unordered_map<TokenId, std::size_t> tf;
    for (auto t : doc) ++tf[t];
    TfidfScores scores;
    for (const auto& [t, count] : tf) {
      scores[t] = static_cast<double>(count) * std::log(n_docs / static_cast<double>(df[t]));
    }
    out.push_back(std::move(scores));
  }
  return out;
}

std::vector<TfidfScores> tfidf_scores(std::span<const TaskExample> examples,
                                      const Vocabulary& vocab) {
  std::vector<std::vector<TokenId>> docs;
  docs.reserve(examples.size());
  for (const auto& ex : examples) {
    std::vector<TokenId> doc;
    for (const auto& name : task_schema(ex.task).fields) {
      auto ids = vocab.encode(ex.field(name));
      doc.insert(doc.end(), ids.begin(), ids.end());
    }
    docs.push_back(std::move(doc));
  }
  return tfidf_scores(docs);
}

MaskPlan sample_mask_plan_tfidf(const ClozeInstance& instance, const MaskScheme& scheme,
                                const TfidfScores& scores, Rng& rng) {
  scheme.validate();
  require_context(instance);
  const auto n = instance.context_positions.size();
  const auto k = std::min(n, draw_count(max_masked(n, scheme.ratio), MaskKind::kVariable, rng));

  auto score_at = [&](std::size_t ci) {
    auto it = scores.find(instance.ids[instance.context_positions[ci]]);
    return it == scores.end() ? 0.0 : it->second;
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score_at(a) > score_at(b); });
  order.resize(k);
  return plan_from_indices(instance, std::move(order));
}

void apply_plan(std::span<TokenId> ids, const MaskPlan& plan) {
  for (auto pos : plan.positions) {
    if (pos >= ids.size()) throw Error("mask plan position out of range");
    ids[pos] = SpecialIds::kMask;
  }
}

void revert_plan(std::span<TokenId> ids, const MaskPlan& plan) {
  for (std::size_t i = 0; i < plan.positions.size(); ++i) {
    if (plan.positions[i] >= ids.size()) throw Error("mask plan position out of range");
    ids[plan.positions[i]] = plan.originals[i];
  }
}

MaskPlan project_plan(const MaskPlan& plan, const ClozeInstance& target) {
  MaskPlan out;
  out.context_indices = plan.context_indices;
  out.originals = plan.originals;
  for (std::size_t i = 0; i < plan.context_indices.size(); ++i) {
    const auto ci = plan.context_indices[i];
    if (ci >= target.context_positions.size()) throw Error("mask plan does not fit rendering");
    const auto pos = target.context_positions[ci];
    if (target.ids[pos] != plan.originals[i]) throw Error("mask plan does not fit rendering");
    out.positions.push_back(pos);
  }
  return out;
}

}  // namespace clozefit
