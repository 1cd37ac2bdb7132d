// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clozefit/common.hpp"
#include "clozefit/tokenizer.hpp"

namespace clozefit {

enum class TaskId { kBoolq, kCb, kRte, kCopa, kWic, kWsc, kMultirc, kRecord };

TaskId parse_task(std::string_view name);
std::string_view task_name(TaskId task);

enum class PrimaryMetric { kAccuracy, kMacroF1, kF1a };

struct TaskSchema {
  TaskId task;
  std::vector<std::string> fields;
  /// Fixed label set; empty when labels are supplied per example (ReCoRD).
  std::vector<std::string> labels;
  PrimaryMetric metric;
};

const TaskSchema& task_schema(TaskId task);

/// Entities of a ReCoRD example are stored in one field, separated by this.
inline constexpr char kEntitySeparator = '\n';
inline constexpr std::string_view kPlaceholder = "@placeholder";

struct TaskExample {
  TaskId task = TaskId::kRte;
  std::map<std::string, std::string> fields;
  std::optional<std::string> label;

  const std::string& field(std::string_view name) const;
};

/// Labels an example is scored over, in label-index order.
std::vector<std::string> example_labels(const TaskExample& example);

// ---------------------------------------------------------------------------
// Patterns and verbalizers

struct Segment {
  enum class Kind {
    kLiteral,
    kField,
    kMask,
    /// A field whose "@placeholder" marker is replaced by the mask slot.
    kPlaceholderField,
  };
  Kind kind;
  std::string text;  // literal text or field name

  bool operator==(const Segment&) const = default;
};

struct Pattern {
  std::vector<Segment> segments;
  std::string source;

  std::size_t mask_slot_count() const;
  std::vector<std::string> field_names() const;
};

/// Template syntax: `{field}` is a field slot, a run of two or more
/// underscores is the mask slot, `{field@placeholder}` is a field whose
/// "@placeholder" becomes the mask slot, and `|` marks a segment boundary
/// that emits no token. Everything else is literal text.
Pattern parse_pattern(std::string_view text);

class Verbalizer {
 public:
  enum class Kind { kFixed, kFieldRef, kEntities };

  /// label -> verbalization text.
  static Verbalizer fixed(std::vector<std::pair<std::string, std::string>> entries);
  /// label -> name of the example field holding the verbalization (COPA, WSC).
  static Verbalizer from_fields(std::vector<std::pair<std::string, std::string>> entries);
  /// Every entity listed in `field` is both a label and its verbalization.
  static Verbalizer entities(std::string field);

  /// (label, verbalization) pairs for this example in label order.
  std::vector<std::pair<std::string, std::string>> resolve(const TaskExample& example) const;

  Kind kind() const { return kind_; }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  Kind kind_ = Kind::kFixed;
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct PatternId {
  TaskId task;
  int index;  // 1-based within the task's catalog

  bool operator==(const PatternId&) const = default;
};

struct PVP {
  PatternId id;
  Pattern pattern;
  Verbalizer verbalizer;
  /// Replaces `pattern` for label-conditioned rendering when set (COPA).
  std::optional<Pattern> conditioning_pattern;
  /// (field, value): the PVP only applies to examples with that field value.
  std::optional<std::pair<std::string, std::string>> guard;

  bool applies_to(const TaskExample& example) const;
};

/// Validates the template against the task schema.
PVP make_pvp(TaskId task, int index, std::string_view pattern_text, Verbalizer verbalizer,
             std::optional<std::string_view> conditioning_text = std::nullopt,
             std::optional<std::pair<std::string, std::string>> guard = std::nullopt);

std::vector<PVP> builtin_pvps(TaskId task);

/// Custom PVP file: blocks of `pattern:`, `verbalizer:` and optional
/// `conditioning:` / `when:` / `index:` lines separated by blank lines.
/// Blocks without `index:` take the previous index plus one. Verbalizer
/// entries are `label=text` separated by `;`, `label={field}` for field
/// references.
std::vector<PVP> parse_pvp_text(std::string_view text, TaskId task);
std::vector<PVP> load_pvp_file(const std::filesystem::path& path, TaskId task);

/// Distinct pattern indices in a PVP list.
std::vector<int> pattern_indices(std::span<const PVP> pvps);

/// The PVP with the given index that applies to the example.
const PVP& select_pvp(std::span<const PVP> pvps, int index, const TaskExample& example);

/// Literal and verbalizer text of the PVPs, for vocabulary building.
std::vector<std::string> pvp_corpus(std::span<const PVP> pvps);

// ---------------------------------------------------------------------------
// Cloze instances

struct ClozeInstance {
  std::vector<TokenId> ids;
  std::vector<std::size_t> mask_positions;
  std::vector<std::string> labels;
  /// Token ids of each label's verbalization, aligned with `labels`.
  std::vector<std::vector<TokenId>> candidates;
  /// Positions that came from field slots; only these may be masked for
  /// label conditioning.
  std::vector<std::size_t> context_positions;
  /// Positions holding inserted verbalizer tokens (conditioned renderings).
  std::vector<std::size_t> label_positions;
  /// Label whose token length sized the mask slot (or whose tokens were inserted).
  std::size_t rendered_label = 0;
  std::optional<std::size_t> true_label;

  std::size_t label_count() const { return labels.size(); }
  bool single_token() const;
};

std::size_t label_index(const ClozeInstance& instance, std::string_view label);

/// Cloze question with the mask slot expanded to |verbalizer(label)| MASK
/// tokens. Over-long renderings are cut by repeatedly dropping the last
/// token of the longest field slot.
ClozeInstance render(const PVP& pvp, const TaskExample& example, std::string_view label,
                     const Vocabulary& vocab, std::size_t max_len);

/// Same layout with the label's tokens written into the mask slot and no
/// masks; uses the PVP's conditioning pattern when it has one.
ClozeInstance render_label_conditioned(const PVP& pvp, const TaskExample& example,
                                       std::string_view label, const Vocabulary& vocab,
                                       std::size_t max_len);

// ---------------------------------------------------------------------------
// Task files (line-delimited JSON records)

std::vector<TaskExample> load_task_examples(const std::filesystem::path& path, TaskId task);
std::vector<TaskExample> parse_task_examples(std::string_view text, TaskId task);
TaskExample parse_task_example(std::string_view line, TaskId task);
std::string format_task_example(const TaskExample& example);
void save_task_examples(const std::filesystem::path& path, std::span<const TaskExample> examples);

}  // namespace clozefit
