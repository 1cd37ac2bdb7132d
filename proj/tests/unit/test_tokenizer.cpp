// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>

#include "clozefit/synthetic.hpp"
#include "clozefit/tokenizer.hpp"
#include "oracles.hpp"

namespace clozefit {
namespace {

TEST(Tokenizer, OrdersByCountThenLexicographic) {
  const std::vector<std::string> corpus = {"a b b"};
  const auto v = Vocabulary::build(corpus, 1);
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v.id_of("b"), 4);
  EXPECT_EQ(v.id_of("a"), 5);
  for (TokenId i = 0; i < 4; ++i) EXPECT_EQ(v.token(i), kSpecialTokens[static_cast<std::size_t>(i)]);
}

TEST(Tokenizer, MinCountDropsRareTokens) {
  const std::vector<std::string> corpus = {"a b b"};
  const auto v = Vocabulary::build(corpus, 2);
  EXPECT_EQ(v.size(), 5u);
  EXPECT_EQ(v.id_of("b"), 4);
  EXPECT_EQ(v.encode("a"), std::vector<TokenId>{SpecialIds::kUnk});
}

TEST(Tokenizer, EmptyCorpusIsAnError) {
  const std::vector<std::string> corpus;
  EXPECT_THROW(
      {
        try {
          Vocabulary::build(corpus, 1);
        } catch (const Error& e) {
          EXPECT_NE(std::string(e.what()).find("empty corpus"), std::string::npos);
          throw;
        }
      },
      Error);
}

TEST(Tokenizer, RoundTripsInVocabularyText) {
  const std::vector<std::string> corpus = {"a b b"};
  const auto v = Vocabulary::build(corpus, 1);
  EXPECT_EQ(v.encode("b a b"), (std::vector<TokenId>{4, 5, 4}));
  EXPECT_EQ(v.decode(v.encode("b a b")), "b a b");
  EXPECT_EQ(v.decode(v.encode("z")), "[UNK]");
  EXPECT_TRUE(v.encode("").empty());
  EXPECT_EQ(v.decode(std::vector<TokenId>{}), "");
  EXPECT_EQ(v.decode(v.encode("  B   a\tb ")), normalize("  B   a\tb "));
}

TEST(Tokenizer, DecodeRejectsUnknownIds) {
  const std::vector<std::string> corpus = {"a"};
  const auto v = Vocabulary::build(corpus, 1);
  const std::vector<TokenId> bad = {static_cast<TokenId>(v.size())};
  EXPECT_THROW(v.decode(bad), Error);
}

TEST(Tokenizer, PunctuationIsSplitAndSpecialsKept) {
  EXPECT_EQ(split_words("Oil prices rise?"), (std::vector<std::string>{"oil", "prices", "rise", "?"}));
  EXPECT_EQ(split_words("[MASK], ok"), (std::vector<std::string>{"[MASK]", ",", "ok"}));
}

TEST(Tokenizer, SyntheticCorpusSizeMatchesDistinctCount) {
  SyntheticSpec spec;
  spec.n_train = 200;
  spec.n_dev = 0;
  spec.n_test = 0;
  Rng rng(3);
  const auto data = generate(spec, rng);
  std::vector<std::string> corpus;
  for (const auto& ex : data.train) {
    for (const auto& [k, v] : ex.fields) corpus.push_back(v);
  }
  ASSERT_EQ(corpus.size(), 400u);
  const auto v = Vocabulary::build(corpus, 1);
  EXPECT_EQ(v.size(), 4 + oracle::distinct_tokens(corpus));
}

TEST(Tokenizer, SerializationIsDeterministicAndRoundTrips) {
  const std::vector<std::string> corpus = {"the cat sat", "on the mat ."};
  const auto a = Vocabulary::build(corpus, 1);
  const auto b = Vocabulary::build(corpus, 1);
  EXPECT_EQ(a.serialize(), b.serialize());
  EXPECT_EQ(Vocabulary::parse(a.serialize()), a);
  const auto path = std::filesystem::temp_directory_path() / "clozefit_vocab_test.txt";
  a.save(path);
  EXPECT_EQ(Vocabulary::load(path), a);
  std::filesystem::remove(path);
}

TEST(Tokenizer, InverseMapsAgree) {
  const std::vector<std::string> corpus = {"x y z x y x"};
  const auto v = Vocabulary::build(corpus, 1);
  for (TokenId i = 0; i < static_cast<TokenId>(v.size()); ++i) EXPECT_EQ(v.id_of(v.token(i)), i);
}

TEST(Tokenizer, FromTokensValidatesSpecials) {
  EXPECT_THROW(Vocabulary::from_tokens({"a", "b"}), Error);
  EXPECT_THROW(Vocabulary::from_tokens({"[MASK]", "[PAD]", "[UNK]", "[SEP]", "a", "a"}), Error);
}

}  // namespace
}  // namespace clozefit
