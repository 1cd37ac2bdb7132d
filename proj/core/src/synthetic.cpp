// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace clozefit {
namespace {

constexpr std::string_view kOnsets = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr int kFillerCount = 40;
constexpr int kPivotCount = 6;
constexpr int kMarkersPerSense = 3;

std::string made_up_word(Rng& rng) {
  const auto syllables = rng.uniform_int(2, 3);
  std::string w;
  for (std::int64_t s = 0; s < syllables; ++s) {
    w.push_back(kOnsets[static_cast<std::size_t>(rng.uniform_int(0, kOnsets.size() - 1))]);
    w.push_back(kVowels[static_cast<std::size_t>(rng.uniform_int(0, kVowels.size() - 1))]);
  }
  return w;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(v.size()) - 1))];
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::string> fillers(const SyntheticLexicon& lex, Rng& rng, int lo, int hi) {
  std::vector<std::string> out(static_cast<std::size_t>(rng.uniform_int(lo, hi)));
  for (auto& w : out) w = pick(lex.fillers, rng);
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s.push_back(' ');
    s += w;
  }
  return s;
}

TaskExample keyword_entailment(const SyntheticLexicon& lex, bool positive, Rng& rng) {
  auto premise = fillers(lex, rng, 3, 5);
  if (positive) {
    const auto at = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(premise.size())));
    premise.insert(premise.begin() + static_cast<std::ptrdiff_t>(at), lex.trigger);
  }
  TaskExample ex;
  ex.task = TaskId::kRte;
  ex.fields["premise"] = join(premise);
  ex.fields["hypothesis"] = join(fillers(lex, rng, 1, 2));
  ex.label = positive ? "entailment" : "not_entailment";
  return ex;
}

TaskExample negation_flip(const SyntheticLexicon& lex, bool positive, Rng& rng) {
  const auto premise = fillers(lex, rng, 5, 8);
  std::vector<std::string> hypothesis(premise.begin(), premise.begin() + 3);
  if (!positive) {
    const auto at = static_cast<std::size_t>(rng.uniform_int(1, 2));
    hypothesis.insert(hypothesis.begin() + static_cast<std::ptrdiff_t>(at), "not");
  }
  TaskExample ex;
  ex.task = TaskId::kRte;
  ex.fields["premise"] = join(premise);
  ex.fields["hypothesis"] = join(hypothesis);
  ex.label = positive ? "entailment" : "not_entailment";
  return ex;
}

std::string sense_sentence(const SyntheticLexicon& lex, std::size_t pivot, std::size_t sense, Rng& rng) {
  auto words = fillers(lex, rng, 2, 4);
  const auto& markers = lex.sense_markers[pivot * 2 + sense];
  words.push_back(lex.pivots[pivot]);
  words.push_back(pick(markers, rng));
  auto tail = fillers(lex, rng, 1, 3);
  words.insert(words.end(), tail.begin(), tail.end());
  return join(words);
}

TaskExample paired_word_sense(const SyntheticLexicon& lex, bool positive, Rng& rng) {
  const auto pivot = static_cast<std::size_t>(rng.uniform_int(0, kPivotCount - 1));
  const auto s1 = static_cast<std::size_t>(rng.uniform_int(0, 1));
  const auto s2 = positive ? s1 : 1 - s1;
  TaskExample ex;
  ex.task = TaskId::kWic;
  ex.fields["word"] = lex.pivots[pivot];
  ex.fields["sentence1"] = sense_sentence(lex, pivot, s1, rng);
  ex.fields["sentence2"] = sense_sentence(lex, pivot, s2, rng);
  ex.label = positive ? "true" : "false";
  return ex;
}

std::vector<TaskExample> make_split(const SyntheticSpec& spec, const SyntheticLexicon& lex, int n,
                                    Rng& rng) {
  std::vector<TaskExample> out;
  for (int i = 0; i < n; ++i) {
    const bool positive = i % 2 == 0;
    switch (spec.kind) {
      case SyntheticKind::kKeywordEntailment: out.push_back(keyword_entailment(lex, positive, rng)); break;
      case SyntheticKind::kNegationFlip: out.push_back(negation_flip(lex, positive, rng)); break;
      case SyntheticKind::kPairedWordSense: out.push_back(paired_word_sense(lex, positive, rng)); break;
    }
  }
  shuffle(out, rng);
  return out;
}

void flip_label(TaskExample& ex) {
  const auto& labels = task_schema(ex.task).labels;
  ex.label = *ex.label == labels[0] ? labels[1] : labels[0];
}

}  // namespace

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "keyword-entailment") return SyntheticKind::kKeywordEntailment;
  if (name == "negation-flip") return SyntheticKind::kNegationFlip;
  if (name == "paired-word-sense") return SyntheticKind::kPairedWordSense;
  throw Error("unknown synthetic task '" + std::string(name) + "'");
}

std::string_view synthetic_kind_name(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kKeywordEntailment: return "keyword-entailment";
    case SyntheticKind::kNegationFlip: return "negation-flip";
    case SyntheticKind::kPairedWordSense: return "paired-word-sense";
  }
  return "unknown";
}

TaskId synthetic_task(SyntheticKind kind) {
  return kind == SyntheticKind::kPairedWordSense ? TaskId::kWic : TaskId::kRte;
}

void SyntheticSpec::validate() const {
  if (n_train < 1) throw Error("synthetic.n_train must be >= 1");
  if (n_dev < 0 || n_test < 0) throw Error("synthetic split sizes must be >= 0");
  if (!(noise >= 0.0 && noise < 0.5)) throw Error("synthetic.noise must be in [0, 0.5)");
}

SyntheticLexicon synthetic_lexicon(std::uint64_t vocab_seed) {
  Rng rng(vocab_seed);
  std::set<std::string> used;
  auto fresh = [&] {
    for (;;) {
      auto w = made_up_word(rng);
      if (used.insert(w).second) return w;
    }
  };
  SyntheticLexicon lex;
  lex.trigger = fresh();
  for (int i = 0; i < kFillerCount; ++i) lex.fillers.push_back(fresh());
  for (int p = 0; p < kPivotCount; ++p) {
    lex.pivots.push_back(fresh());
    for (int s = 0; s < 2; ++s) {
      std::vector<std::string> markers;
      for (int k = 0; k < kMarkersPerSense; ++k) markers.push_back(fresh());
      lex.sense_markers.push_back(std::move(markers));
    }
  }
  return lex;
}

SyntheticData generate(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  const auto lex = synthetic_lexicon(spec.vocab_seed);
  SyntheticData data;
  data.task = synthetic_task(spec.kind);
  data.train = make_split(spec, lex, spec.n_train, rng);
  data.dev = make_split(spec, lex, spec.n_dev, rng);
  data.test = make_split(spec, lex, spec.n_test, rng);

  const auto per_class = static_cast<int>(std::lround(spec.noise * spec.n_train / 2.0));
  if (per_class > 0) {
    const auto first = task_schema(data.task).labels[0];
    int flipped_pos = 0, flipped_neg = 0;
    for (auto& ex : data.train) {
      const bool pos = *ex.label == first;
      if (pos && flipped_pos < per_class) {
        ++flipped_pos;
        flip_label(ex);
      } else if (!pos && flipped_neg < per_class) {
        ++flipped_neg;
        flip_label(ex);
      }
    }
  }
  return data;
}

}  // namespace clozefit
