// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace clozefit {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) ||
         (u >= 123 && u <= 126);
}

char to_lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

bool is_special_token(std::string_view token) {
  return std::find(kSpecialTokens.begin(), kSpecialTokens.end(), token) != kSpecialTokens.end();
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '[') {
      bool matched = false;
      for (auto special : kSpecialTokens) {
        if (text.substr(i, special.size()) == special) {
          flush();
          out.emplace_back(special);
          i += special.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    if (is_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      out.emplace_back(1, c);
    } else {
      current.push_back(to_lower_ascii(c));
    }
    ++i;
  }
  flush();
  return out;
}

std::string normalize(std::string_view text) {
  std::string out;
  for (const auto& word : split_words(text)) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : id_to_token_(std::move(tokens)) {
  token_to_id_.reserve(id_to_token_.size());
  for (std::size_t id = 0; id < id_to_token_.size(); ++id) {
    const auto& tok = id_to_token_[id];
    if (tok.empty()) throw Error("vocabulary: empty token at id " + std::to_string(id));
    if (!token_to_id_.emplace(tok, static_cast<TokenId>(id)).second) {
      throw Error("vocabulary: duplicate token '" + tok + "'");
    }
  }
}

Vocabulary Vocabulary::build(std::span<const std::string> corpus, int min_count) {
  if (corpus.empty()) throw Error("empty corpus");
  if (min_count < 1) throw Error("vocabulary: min_count must be >= 1");

  std::map<std::string, long> counts;
  for (const auto& text : corpus) {
    for (auto& word : split_words(text)) {
      if (is_special_token(word)) continue;
      ++counts[std::move(word)];
    }
  }
  std::vector<std::pair<std::string, long>> kept;
  for (auto& [tok, n] : counts) {
    if (n >= min_count) kept.emplace_back(tok, n);
  }
  // std::map iteration is already lexicographic; stable sort keeps it as the tie-break.
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens(kSpecialTokens.begin(), kSpecialTokens.end());
  tokens.reserve(tokens.size() + kept.size());
  for (auto& [tok, n] : kept) tokens.push_back(std::move(tok));
  return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < kSpecialTokens.size()) throw Error("vocabulary: missing special tokens");
  for (std::size_t i = 0; i < kSpecialTokens.size(); ++i) {
    if (tokens[i] != kSpecialTokens[i]) {
      throw Error("vocabulary: id " + std::to_string(i) + " must be " +
                  std::string(kSpecialTokens[i]));
    }
  }
  return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::parse(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    tokens.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocabulary file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (const auto& tok : id_to_token_) {
    out += tok;
    out.push_back('\n');
  }
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write vocabulary file " + path.string());
  out << serialize();
  if (!out) throw Error("write failed for " + path.string());
}

TokenId Vocabulary::id_of(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? SpecialIds::kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.contains(std::string(token));
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw Error("unknown id " + std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode_words(std::span<const std::string> words) const {
  std::vector<TokenId> ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(id_of(w));
  return ids;
}

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
  const auto words = split_words(text);
  return encode_words(words);
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (auto id : ids) {
    const auto& tok = token(id);
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

}  // namespace clozefit
