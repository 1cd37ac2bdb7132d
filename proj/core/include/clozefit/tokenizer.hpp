// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clozefit/common.hpp"

namespace clozefit {

/// Reserved ids. They always occupy the four lowest slots in this order.
struct SpecialIds {
  static constexpr TokenId kMask = 0;
  static constexpr TokenId kPad = 1;
  static constexpr TokenId kUnk = 2;
  static constexpr TokenId kSep = 3;
  static constexpr TokenId kCount = 4;
};

inline constexpr std::array<std::string_view, 4> kSpecialTokens = {"[MASK]", "[PAD]", "[UNK]",
                                                                   "[SEP]"};

/// Splits text into normalised word tokens.
///
/// ASCII letters are lowercased, whitespace separates tokens and every ASCII
/// punctuation character becomes a token of its own. The literal special
/// token spellings ("[MASK]" etc.) are kept intact.
std::vector<std::string> split_words(std::string_view text);

/// split_words joined by single spaces.
std::string normalize(std::string_view text);

bool is_special_token(std::string_view token);

/// Word-level vocabulary. Immutable once built.
class Vocabulary {
 public:
  /// Specials followed by every token with count >= min_count, ordered by
  /// descending count then lexicographically.
  static Vocabulary build(std::span<const std::string> corpus, int min_count = 1);

  /// Adopts an explicit id order; the first four entries must be the specials.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  /// One token per line, line number = id.
  static Vocabulary parse(std::string_view text);
  static Vocabulary load(const std::filesystem::path& path);
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  std::vector<TokenId> encode(std::string_view text) const;
  std::vector<TokenId> encode_words(std::span<const std::string> words) const;
  std::string decode(std::span<const TokenId> ids) const;

  /// UNK for out-of-vocabulary tokens.
  TokenId id_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;

  std::size_t size() const { return id_to_token_.size(); }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  bool operator==(const Vocabulary& other) const { return id_to_token_ == other.id_to_token_; }

 private:
  explicit Vocabulary(std::vector<std::string> tokens);

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

}  // namespace clozefit
