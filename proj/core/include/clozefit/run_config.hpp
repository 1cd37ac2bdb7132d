// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clozefit/masking.hpp"
#include "clozefit/model.hpp"
#include "clozefit/synthetic.hpp"
#include "clozefit/trainer.hpp"

namespace clozefit {

/// Flat `key = value` configuration. Every key has a default; unknown keys
/// are rejected. `#` starts a comment line.
class RunConfig {
 public:
  RunConfig();

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  /// Sorted `key = value` lines covering every key.
  std::string to_text() const;

  void set(std::string_view key, std::string_view value);
  /// Parses `key=value`.
  void apply_override(std::string_view assignment);

  const std::string& get(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<std::string> get_list(std::string_view key) const;

  static const std::map<std::string, std::string>& defaults();

  // Typed views; each validates its part.
  TaskId task() const;
  std::optional<SyntheticSpec> synthetic() const;
  TrainConfig train_config() const;
  ModelConfig model_config(std::size_t vocab_size) const;

  /// Checks every typed view and the referenced files.
  void validate() const;

  bool operator==(const RunConfig&) const = default;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace clozefit
