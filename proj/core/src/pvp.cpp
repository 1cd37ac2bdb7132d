// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/pvp.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace clozefit {
namespace {

const std::vector<TaskSchema>& schemas() {
  static const std::vector<TaskSchema> kSchemas = {
      {TaskId::kBoolq, {"passage", "question"}, {"true", "false"}, PrimaryMetric::kAccuracy},
      {TaskId::kCb,
       {"premise", "hypothesis"},
       {"entailment", "contradiction", "neutral"},
       PrimaryMetric::kMacroF1},
      {TaskId::kRte,
       {"premise", "hypothesis"},
       {"entailment", "not_entailment"},
       PrimaryMetric::kAccuracy},
      {TaskId::kCopa,
       {"premise", "choice1", "choice2", "question"},
       {"0", "1"},
       PrimaryMetric::kAccuracy},
      {TaskId::kWic, {"word", "sentence1", "sentence2"}, {"true", "false"}, PrimaryMetric::kAccuracy},
      {TaskId::kWsc, {"text", "span1", "span2"}, {"true"}, PrimaryMetric::kAccuracy},
      {TaskId::kMultirc, {"passage", "question", "answer"}, {"true", "false"}, PrimaryMetric::kF1a},
      {TaskId::kRecord, {"passage", "question", "entities"}, {}, PrimaryMetric::kAccuracy},
  };
  return kSchemas;
}

std::string strip_final_punct(std::string text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '.' || text.back() == '!' ||
                           text.back() == '?')) {
    text.pop_back();
  }
  return text;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

void validate_pattern(const Pattern& pattern, const TaskSchema& schema, std::string_view what) {
  if (pattern.mask_slot_count() != 1) {
    throw Error(std::string(what) + " must contain exactly one mask slot: '" + pattern.source +
                "'");
  }
  for (const auto& name : pattern.field_names()) {
    if (std::find(schema.fields.begin(), schema.fields.end(), name) == schema.fields.end()) {
      throw Error(std::string(what) + " references unknown field '" + name + "' for task " +
                  std::string(task_name(schema.task)));
    }
  }
}

struct Piece {
  enum class Kind { kLiteral, kField, kSlot };
  Kind kind;
  std::vector<TokenId> ids;
};

ClozeInstance render_impl(const PVP& pvp, const Pattern& pattern, const TaskExample& example,
                          std::string_view label, const Vocabulary& vocab, std::size_t max_len,
                          bool conditioned) {
  if (example.task != pvp.id.task) throw Error("example task does not match PVP task");
  if (!pvp.applies_to(example)) throw Error("PVP does not apply to this example");

  ClozeInstance inst;
  for (auto& [lab, text] : pvp.verbalizer.resolve(example)) {
    auto ids = vocab.encode(text);
    if (ids.empty()) throw Error("verbalizer for label '" + lab + "' is empty");
    for (const auto& other : inst.candidates) {
      if (other == ids) throw Error("verbalizer maps two labels to the same tokens");
    }
    inst.labels.push_back(lab);
    inst.candidates.push_back(std::move(ids));
  }
  inst.rendered_label = label_index(inst, label);
  if (example.label) inst.true_label = label_index(inst, *example.label);
  const auto& slot_tokens = inst.candidates[inst.rendered_label];

  std::vector<Piece> pieces;
  auto push_slot = [&] {
    Piece p{Piece::Kind::kSlot, {}};
    if (conditioned) {
      p.ids = slot_tokens;
    } else {
      p.ids.assign(slot_tokens.size(), SpecialIds::kMask);
    }
    pieces.push_back(std::move(p));
  };
  for (const auto& seg : pattern.segments) {
    switch (seg.kind) {
      case Segment::Kind::kLiteral:
        pieces.push_back({Piece::Kind::kLiteral, vocab.encode(seg.text)});
        break;
      case Segment::Kind::kField:
        pieces.push_back({Piece::Kind::kField, vocab.encode(example.field(seg.text))});
        break;
      case Segment::Kind::kMask:
        push_slot();
        break;
      case Segment::Kind::kPlaceholderField: {
        const auto& text = example.field(seg.text);
        const auto at = text.find(kPlaceholder);
        if (at == std::string::npos) {
          throw Error("field '" + seg.text + "' has no " + std::string(kPlaceholder));
        }
        pieces.push_back({Piece::Kind::kField, vocab.encode(std::string_view(text).substr(0, at))});
        push_slot();
        pieces.push_back({Piece::Kind::kField,
                          vocab.encode(std::string_view(text).substr(at + kPlaceholder.size()))});
        break;
      }
    }
  }

  // Every label's rendering is cut to the same field content.
  std::size_t longest_label = 0;
  for (const auto& c : inst.candidates) longest_label = std::max(longest_label, c.size());
  const std::size_t slack = longest_label - slot_tokens.size();
  if (slack >= max_len) throw Error("untruncatable: verbalizations exceed max_len");
  const std::size_t budget = max_len - slack;

  std::size_t total = 0;
  for (const auto& p : pieces) total += p.ids.size();
  while (total > budget) {
    Piece* longest = nullptr;
    for (auto& p : pieces) {
      if (p.kind == Piece::Kind::kField && (!longest || p.ids.size() > longest->ids.size())) {
        longest = &p;
      }
    }
    if (!longest || longest->ids.empty()) {
      throw Error("untruncatable: rendering needs more than " + std::to_string(max_len) +
                  " tokens without any field content");
    }
    longest->ids.pop_back();
    --total;
  }

  inst.ids.reserve(total);
  for (const auto& p : pieces) {
    for (auto id : p.ids) {
      const auto pos = inst.ids.size();
      inst.ids.push_back(id);
      if (p.kind == Piece::Kind::kField) {
        if (id >= SpecialIds::kCount) inst.context_positions.push_back(pos);
      } else if (p.kind == Piece::Kind::kSlot) {
        (conditioned ? inst.label_positions : inst.mask_positions).push_back(pos);
      }
    }
  }
  return inst;
}

}  // namespace

TaskId parse_task(std::string_view name) {
  static const std::map<std::string, TaskId, std::less<>> kNames = {
      {"boolq", TaskId::kBoolq}, {"cb", TaskId::kCb},   {"rte", TaskId::kRte},
      {"copa", TaskId::kCopa},   {"wic", TaskId::kWic}, {"wsc", TaskId::kWsc},
      {"multirc", TaskId::kMultirc}, {"record", TaskId::kRecord}};
  auto it = kNames.find(name);
  if (it == kNames.end()) throw Error("unknown task '" + std::string(name) + "'");
  return it->second;
}

std::string_view task_name(TaskId task) {
  switch (task) {
    case TaskId::kBoolq: return "boolq";
    case TaskId::kCb: return "cb";
    case TaskId::kRte: return "rte";
    case TaskId::kCopa: return "copa";
    case TaskId::kWic: return "wic";
    case TaskId::kWsc: return "wsc";
    case TaskId::kMultirc: return "multirc";
    case TaskId::kRecord: return "record";
  }
  return "unknown";
}

const TaskSchema& task_schema(TaskId task) {
  for (const auto& s : schemas()) {
    if (s.task == task) return s;
  }
  throw Error("no schema for task");
}

const std::string& TaskExample::field(std::string_view name) const {
  auto it = fields.find(std::string(name));
  if (it == fields.end()) throw Error("example has no field '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> example_labels(const TaskExample& example) {
  const auto& schema = task_schema(example.task);
  if (!schema.labels.empty()) return schema.labels;
  std::vector<std::string> out;
  const auto& joined = example.field("entities");
  std::size_t start = 0;
  while (start <= joined.size()) {
    auto end = joined.find(kEntitySeparator, start);
    if (end == std::string::npos) end = joined.size();
    auto entity = trim(std::string_view(joined).substr(start, end - start));
    if (!entity.empty() && std::find(out.begin(), out.end(), entity) == out.end()) {
      out.push_back(std::move(entity));
    }
    start = end + 1;
  }
  return out;
}

std::size_t Pattern::mask_slot_count() const {
  return static_cast<std::size_t>(std::count_if(segments.begin(), segments.end(), [](const auto& s) {
    return s.kind == Segment::Kind::kMask || s.kind == Segment::Kind::kPlaceholderField;
  }));
}

std::vector<std::string> Pattern::field_names() const {
  std::vector<std::string> names;
  for (const auto& s : segments) {
    if (s.kind == Segment::Kind::kField || s.kind == Segment::Kind::kPlaceholderField) {
      names.push_back(s.text);
    }
  }
  return names;
}

Pattern parse_pattern(std::string_view text) {
  Pattern pattern;
  pattern.source = std::string(text);
  std::string literal;
  auto flush = [&] {
    if (!literal.empty()) {
      pattern.segments.push_back({Segment::Kind::kLiteral, std::move(literal)});
      literal.clear();
    }
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '{') {
      const auto close = text.find('}', i);
      if (close == std::string_view::npos) throw Error("unterminated field slot in pattern");
      std::string name(text.substr(i + 1, close - i - 1));
      if (name.empty()) throw Error("empty field slot in pattern");
      flush();
      constexpr std::string_view kSuffix = "@placeholder";
      if (name.size() > kSuffix.size() && name.ends_with(kSuffix)) {
        name.resize(name.size() - kSuffix.size());
        pattern.segments.push_back({Segment::Kind::kPlaceholderField, std::move(name)});
      } else {
        pattern.segments.push_back({Segment::Kind::kField, std::move(name)});
      }
      i = close + 1;
    } else if (c == '_' && i + 1 < text.size() && text[i + 1] == '_') {
      flush();
      while (i < text.size() && text[i] == '_') ++i;
      pattern.segments.push_back({Segment::Kind::kMask, {}});
    } else if (c == '|') {
      flush();
      ++i;
    } else {
      literal.push_back(c);
      ++i;
    }
  }
  flush();
  return pattern;
}

Verbalizer Verbalizer::fixed(std::vector<std::pair<std::string, std::string>> entries) {
  if (entries.empty()) throw Error("verbalizer has no labels");
  std::set<std::string> labels;
  std::set<std::string> texts;
  for (const auto& [label, text] : entries) {
    const auto norm = normalize(text);
    if (norm.empty()) throw Error("verbalizer for label '" + label + "' is empty");
    if (!labels.insert(label).second) throw Error("verbalizer repeats label '" + label + "'");
    if (!texts.insert(norm).second) throw Error("verbalizer maps two labels to the same tokens");
  }
  Verbalizer v;
  v.kind_ = Kind::kFixed;
  v.entries_ = std::move(entries);
  return v;
}

Verbalizer Verbalizer::from_fields(std::vector<std::pair<std::string, std::string>> entries) {
  if (entries.empty()) throw Error("verbalizer has no labels");
  Verbalizer v;
  v.kind_ = Kind::kFieldRef;
  v.entries_ = std::move(entries);
  return v;
}

Verbalizer Verbalizer::entities(std::string field) {
  Verbalizer v;
  v.kind_ = Kind::kEntities;
  v.entries_ = {{"", std::move(field)}};
  return v;
}

std::vector<std::pair<std::string, std::string>> Verbalizer::resolve(
    const TaskExample& example) const {
  switch (kind_) {
    case Kind::kFixed:
      return entries_;
    case Kind::kFieldRef: {
      std::vector<std::pair<std::string, std::string>> out;
      for (const auto& [label, field] : entries_) {
        // Choices are full sentences; the trailing period would otherwise
        // become part of the label.
        out.emplace_back(label, strip_final_punct(example.field(field)));
      }
      return out;
    }
    case Kind::kEntities: {
      std::vector<std::pair<std::string, std::string>> out;
      for (auto& e : example_labels(example)) out.emplace_back(e, e);
      if (out.empty()) throw Error("example lists no entities");
      return out;
    }
  }
  return {};
}

bool PVP::applies_to(const TaskExample& example) const {
  if (!guard) return true;
  auto it = example.fields.find(guard->first);
  return it != example.fields.end() && it->second == guard->second;
}

PVP make_pvp(TaskId task, int index, std::string_view pattern_text, Verbalizer verbalizer,
             std::optional<std::string_view> conditioning_text,
             std::optional<std::pair<std::string, std::string>> guard) {
  const auto& schema = task_schema(task);
  PVP pvp{{task, index}, parse_pattern(pattern_text), std::move(verbalizer), std::nullopt,
          std::move(guard)};
  validate_pattern(pvp.pattern, schema, "pattern");
  if (conditioning_text) {
    pvp.conditioning_pattern = parse_pattern(*conditioning_text);
    validate_pattern(*pvp.conditioning_pattern, schema, "conditioning pattern");
  }
  const auto& v = pvp.verbalizer;
  if (v.kind() == Verbalizer::Kind::kFixed || v.kind() == Verbalizer::Kind::kFieldRef) {
    std::set<std::string> mapped;
    for (const auto& [label, target] : v.entries()) {
      mapped.insert(label);
      if (v.kind() == Verbalizer::Kind::kFieldRef &&
          std::find(schema.fields.begin(), schema.fields.end(), target) == schema.fields.end()) {
        throw Error("verbalizer references unknown field '" + target + "'");
      }
    }
    const std::set<std::string> expected(schema.labels.begin(), schema.labels.end());
    if (mapped != expected) {
      throw Error("verbalizer must map exactly the labels of task " +
                  std::string(task_name(task)));
    }
  } else if (!schema.labels.empty()) {
    throw Error("entity verbalizer requires a task with per-example labels");
  }
  if (pvp.guard &&
      std::find(schema.fields.begin(), schema.fields.end(), pvp.guard->first) == schema.fields.end()) {
    throw Error("guard references unknown field '" + pvp.guard->first + "'");
  }
  return pvp;
}

std::vector<PVP> builtin_pvps(TaskId task) {
  std::vector<PVP> out;
  switch (task) {
    case TaskId::kBoolq: {
      const std::vector<std::string> patterns = {
          "{passage}. Question: {question}? Answer: ___.",
          "{passage}. Based on the previous passage, {question}? ___.",
          "Based on the following passage, {question}? ___. {passage}",
      };
      const auto yes_no = Verbalizer::fixed({{"true", "yes"}, {"false", "no"}});
      const auto true_false = Verbalizer::fixed({{"true", "true"}, {"false", "false"}});
      int index = 1;
      for (const auto& p : patterns) out.push_back(make_pvp(task, index++, p, yes_no));
      for (const auto& p : patterns) out.push_back(make_pvp(task, index++, p, true_false));
      break;
    }
    case TaskId::kCb:
    case TaskId::kRte: {
      const auto verbalizer =
          task == TaskId::kCb
              ? Verbalizer::fixed({{"entailment", "yes"}, {"contradiction", "no"}, {"neutral", "maybe"}})
              : Verbalizer::fixed({{"entailment", "yes"}, {"not_entailment", "no"}});
      out.push_back(make_pvp(task, 1, "{hypothesis}? | ___, {premise}", verbalizer));
      out.push_back(make_pvp(task, 2, "\"{hypothesis}\"? | ___, \"{premise}\"", verbalizer));
      out.push_back(make_pvp(task, 3, "{hypothesis}? | ___. {premise}", verbalizer));
      out.push_back(make_pvp(task, 4, "\"{hypothesis}?\" | ___. \"{premise}\"", verbalizer));
      break;
    }
    case TaskId::kCopa: {
      const auto choices = Verbalizer::from_fields({{"0", "choice1"}, {"1", "choice2"}});
      const std::pair<std::string, std::string> effect{"question", "effect"};
      const std::pair<std::string, std::string> cause{"question", "cause"};
      constexpr std::string_view kEffectCond = "Because ___ , {premise}.";
      constexpr std::string_view kCauseCond = "Because {premise} , ___.";
      out.push_back(make_pvp(task, 1, "\"{choice1}\" or \"{choice2}\"? {premise}, so ___.", choices,
                             kEffectCond, effect));
      out.push_back(make_pvp(task, 2, "{choice1} or {choice2}? {premise}, so ___.", choices,
                             kEffectCond, effect));
      out.push_back(make_pvp(task, 1, "\"{choice1}\" or \"{choice2}\"? {premise}, because ___.",
                             choices, kCauseCond, cause));
      out.push_back(make_pvp(task, 2, "{choice1} or {choice2}? {premise}, because ___.", choices,
                             kCauseCond, cause));
      break;
    }
    case TaskId::kWic: {
      const auto yes_no = Verbalizer::fixed({{"true", "yes"}, {"false", "no"}});
      out.push_back(make_pvp(task, 1,
                             "\"{sentence1}\" / \"{sentence2}\" Similar sense of \"{word}\"? ___.",
                             yes_no));
      out.push_back(make_pvp(
          task, 2, "{sentence1} {sentence2} Does {word} have the same meaning in both sentences? ___.",
          yes_no));
      out.push_back(make_pvp(task, 3, "{word}. Sense (1) (a) \"{sentence1}\" ( ___ ) \"{sentence2}\"",
                             Verbalizer::fixed({{"true", "b"}, {"false", "2"}})));
      break;
    }
    case TaskId::kWsc: {
      const auto noun = Verbalizer::from_fields({{"true", "span1"}});
      out.push_back(make_pvp(task, 1, "{text} The pronoun '*{span2}*' refers to ___.", noun));
      out.push_back(make_pvp(
          task, 2, "{text} In the previous sentence, the pronoun '*{span2}*' refers to ___.", noun));
      out.push_back(make_pvp(
          task, 3,
          "{text} In the passage above, what does the pronoun '*{span2}*' refer to? Answer: ___.",
          noun));
      break;
    }
    case TaskId::kMultirc: {
      const auto yes_no = Verbalizer::fixed({{"true", "yes"}, {"false", "no"}});
      out.push_back(make_pvp(task, 1, "{passage}. Question: {question}? Is it {answer}? ___.", yes_no));
      out.push_back(make_pvp(
          task, 2, "{passage}. Question: {question}? Is the correct answer \"{answer}\"? ___.", yes_no));
      out.push_back(make_pvp(
          task, 3,
          "{passage}. Based on the previous passage, {question}? Is \"{answer}\" a correct answer? ___.",
          yes_no));
      break;
    }
    case TaskId::kRecord: {
      out.push_back(make_pvp(task, 1, "{passage} {question@placeholder}",
                             Verbalizer::entities("entities")));
      break;
    }
  }
  return out;
}

std::vector<PVP> parse_pvp_text(std::string_view text, TaskId task) {
  struct Block {
    std::optional<std::string> pattern, verbalizer, conditioning, when, index;
    int line = 0;
  };
  std::vector<Block> blocks;
  Block current;
  int line_no = 0;
  auto finish = [&] {
    if (current.pattern || current.verbalizer || current.conditioning || current.when ||
        current.index) {
      blocks.push_back(current);
    }
    current = Block{};
  };
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) {
      finish();
      continue;
    }
    if (line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error("pvp file line " + std::to_string(line_no) + ": expected 'key: value'");
    }
    const auto key = trim(std::string_view(line).substr(0, colon));
    const auto value = trim(std::string_view(line).substr(colon + 1));
    if (current.line == 0) current.line = line_no;
    if (key == "pattern") {
      current.pattern = value;
    } else if (key == "verbalizer") {
      current.verbalizer = value;
    } else if (key == "conditioning") {
      current.conditioning = value;
    } else if (key == "when") {
      current.when = value;
    } else if (key == "index") {
      current.index = value;
    } else {
      throw Error("pvp file line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  finish();

  std::vector<PVP> out;
  int index = 0;
  for (const auto& b : blocks) {
    const auto where = "pvp block at line " + std::to_string(b.line);
    if (!b.pattern || !b.verbalizer) throw Error(where + ": needs pattern and verbalizer");
    std::vector<std::pair<std::string, std::string>> fixed;
    std::vector<std::pair<std::string, std::string>> refs;
    std::stringstream entries(*b.verbalizer);
    std::string entry;
    while (std::getline(entries, entry, ';')) {
      entry = trim(entry);
      if (entry.empty()) continue;
      const auto eq = entry.find('=');
      if (eq == std::string::npos) throw Error(where + ": verbalizer entry needs label=text");
      auto label = trim(std::string_view(entry).substr(0, eq));
      auto target = trim(std::string_view(entry).substr(eq + 1));
      if (target.size() > 2 && target.front() == '{' && target.back() == '}') {
        refs.emplace_back(std::move(label), target.substr(1, target.size() - 2));
      } else {
        fixed.emplace_back(std::move(label), std::move(target));
      }
    }
    if (!fixed.empty() && !refs.empty()) {
      throw Error(where + ": cannot mix literal and field verbalizations");
    }
    std::optional<std::pair<std::string, std::string>> guard;
    if (b.when) {
      const auto eq = b.when->find('=');
      if (eq == std::string::npos) throw Error(where + ": when needs field=value");
      guard = std::pair{trim(std::string_view(*b.when).substr(0, eq)),
                        trim(std::string_view(*b.when).substr(eq + 1))};
    }
    if (b.index) {
      try {
        index = std::stoi(*b.index);
      } catch (const std::exception&) {
        throw Error(where + ": index must be an integer");
      }
      if (index < 1) throw Error(where + ": index must be >= 1");
    } else {
      ++index;
    }
    try {
      auto verbalizer = refs.empty() ? Verbalizer::fixed(std::move(fixed))
                                     : Verbalizer::from_fields(std::move(refs));
      std::optional<std::string_view> cond;
      if (b.conditioning) cond = *b.conditioning;
      out.push_back(make_pvp(task, index, *b.pattern, std::move(verbalizer), cond, guard));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  if (out.empty()) throw Error("pvp file defines no patterns");
  return out;
}

std::vector<PVP> load_pvp_file(const std::filesystem::path& path, TaskId task) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pvp file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pvp_text(buf.str(), task);
}

std::vector<int> pattern_indices(std::span<const PVP> pvps) {
  std::set<int> ids;
  for (const auto& p : pvps) ids.insert(p.id.index);
  return {ids.begin(), ids.end()};
}

const PVP& select_pvp(std::span<const PVP> pvps, int index, const TaskExample& example) {
  for (const auto& p : pvps) {
    if (p.id.index == index && p.applies_to(example)) return p;
  }
  throw Error("no pattern " + std::to_string(index) + " applies to the example");
}

std::vector<std::string> pvp_corpus(std::span<const PVP> pvps) {
  std::vector<std::string> out;
  auto add_pattern = [&](const Pattern& p) {
    for (const auto& s : p.segments) {
      if (s.kind == Segment::Kind::kLiteral) out.push_back(s.text);
    }
  };
  for (const auto& p : pvps) {
    add_pattern(p.pattern);
    if (p.conditioning_pattern) add_pattern(*p.conditioning_pattern);
    if (p.verbalizer.kind() == Verbalizer::Kind::kFixed) {
      for (const auto& [label, text] : p.verbalizer.entries()) out.push_back(text);
    }
  }
  return out;
}

bool ClozeInstance::single_token() const {
  return std::all_of(candidates.begin(), candidates.end(),
                     [](const auto& c) { return c.size() == 1; });
}

std::size_t label_index(const ClozeInstance& instance, std::string_view label) {
  for (std::size_t i = 0; i < instance.labels.size(); ++i) {
    if (instance.labels[i] == label) return i;
  }
  throw Error("unknown label '" + std::string(label) + "'");
}

ClozeInstance render(const PVP& pvp, const TaskExample& example, std::string_view label,
                     const Vocabulary& vocab, std::size_t max_len) {
  return render_impl(pvp, pvp.pattern, example, label, vocab, max_len, false);
}

ClozeInstance render_label_conditioned(const PVP& pvp, const TaskExample& example,
                                       std::string_view label, const Vocabulary& vocab,
                                       std::size_t max_len) {
  const auto& pattern = pvp.conditioning_pattern ? *pvp.conditioning_pattern : pvp.pattern;
  return render_impl(pvp, pattern, example, label, vocab, max_len, true);
}

}  // namespace clozefit
