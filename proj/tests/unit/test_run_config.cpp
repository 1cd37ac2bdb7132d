// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "clozefit/run_config.hpp"

namespace clozefit {
namespace {

TEST(RunConfig, DefaultsMatchStandardPreset) {
  RunConfig c;
  c.set("synthetic.kind", "keyword-entailment");
  const auto t = c.train_config();
  EXPECT_EQ(t.lr, 1e-5);
  EXPECT_EQ(t.weight_decay, 1e-2);
  EXPECT_EQ(t.warmup_frac, 0.1);
  EXPECT_EQ(t.seed, 42u);
  EXPECT_EQ(t.mask.kind, MaskKind::kVariable);
  EXPECT_EQ(t.mask.ratio, 0.105);
  EXPECT_EQ(t.objective, Objective::kAdapet);
  EXPECT_EQ(c.task(), TaskId::kRte);
  EXPECT_EQ(c.model_config(100).vocab_size, 100);
}

TEST(RunConfig, TextRoundTripAndOverrides) {
  auto c = RunConfig::parse("# comment\nsynthetic.kind = negation-flip\ntrain.lr = 0.002\n");
  c.apply_override("objective=pet");
  EXPECT_EQ(c.get("objective"), "pet");
  EXPECT_EQ(c.get_double("train.lr"), 0.002);
  EXPECT_EQ(RunConfig::parse(c.to_text()), c);
  EXPECT_THROW(c.set("train.learning_rate", "1"), Error);
  EXPECT_THROW(c.apply_override("objective"), Error);
  EXPECT_THROW(RunConfig::parse("train.lr 3\n"), Error);
}

TEST(RunConfig, TypedAccessorsValidate) {
  RunConfig c;
  c.set("synthetic.kind", "keyword-entailment");
  c.set("train.batch_size", "abc");
  EXPECT_THROW(c.get_int("train.batch_size"), Error);
  c.set("train.batch_size", "4");
  c.set("pvp.mtmp", "maybe");
  EXPECT_THROW(c.get_bool("pvp.mtmp"), Error);
  c.set("pvp.mtmp", "true");
  EXPECT_TRUE(c.train_config().mtmp);
  EXPECT_EQ(c.get_list("ablate.arms").size(), 4u);
  c.set("train.eval_every", "5000");
  EXPECT_THROW(c.validate(), Error);
}

TEST(RunConfig, MissingDataIsReported) {
  RunConfig c;
  EXPECT_THROW(c.task(), Error);
  c.set("task", "rte");
  EXPECT_THROW(c.validate(), Error);
  c.set("data.train", "/nonexistent/train.jsonl");
  c.set("data.dev", "/nonexistent/dev.jsonl");
  EXPECT_THROW(c.validate(), Error);
  c.set("task", "wic");
  c.set("synthetic.kind", "keyword-entailment");
  EXPECT_THROW(c.task(), Error);
}

}  // namespace
}  // namespace clozefit
