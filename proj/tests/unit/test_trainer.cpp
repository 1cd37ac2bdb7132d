// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "clozefit/checkpoint.hpp"
#include "clozefit/experiment.hpp"
#include "fixtures.hpp"

namespace clozefit {
namespace {

struct SmallTask {
  TaskData data;
  std::vector<PVP> pvps;
  Vocabulary vocab;
  ModelConfig model;
};

SmallTask small_task(std::string kind = "keyword-entailment") {
  RunConfig c;
  c.set("synthetic.kind", kind);
  c.set("synthetic.n_dev", "20");
  c.set("synthetic.n_test", "0");
  c.set("model.d_model", "16");
  c.set("model.n_layers", "1");
  c.set("model.d_ff", "32");
  c.set("model.max_len", "48");
  auto data = load_task_data(c);
  auto pvps = load_pvps(c, data.task);
  auto vocab = build_task_vocabulary(pvps, data, 1);
  auto model = c.model_config(vocab.size());
  return {std::move(data), std::move(pvps), std::move(vocab), model};
}

TrainConfig quick(Objective o) {
  TrainConfig t;
  t.lr = 1e-3;
  t.total_batches = 6;
  t.eval_every = 3;
  t.batch_size = 4;
  t.objective = o;
  return t;
}

TEST(Trainer, ObjectiveNames) {
  for (auto o : {Objective::kPet, Objective::kAdapet, Objective::kAdapetNoLc,
                 Objective::kAdapetLcPosOnly, Objective::kRtd}) {
    EXPECT_EQ(parse_objective(objective_name(o)), o);
  }
  EXPECT_THROW(parse_objective("hinge"), Error);
  EXPECT_TRUE(uses_label_conditioning(Objective::kAdapet));
  EXPECT_FALSE(uses_label_conditioning(Objective::kAdapetNoLc));
  EXPECT_FALSE(uses_label_conditioning(Objective::kPet));
}

TEST(Trainer, ConfigValidation) {
  TrainConfig t;
  EXPECT_NO_THROW(t.validate());
  t.warmup_frac = 1.0;
  EXPECT_THROW(t.validate(), Error);
  t = {};
  t.eval_every = 2000;
  EXPECT_THROW(t.validate(), Error);
  t = {};
  t.lr = 0;
  EXPECT_THROW(t.validate(), Error);
}

TEST(Trainer, RunsAreDeterministic) {
  const auto s = small_task();
  for (auto o : {Objective::kAdapet, Objective::kPet, Objective::kRtd, Objective::kAdapetLcPosOnly}) {
    const auto a = train(quick(o), s.pvps, s.data.train, s.data.dev, s.vocab, init_parameters(s.model));
    const auto b = train(quick(o), s.pvps, s.data.train, s.data.dev, s.vocab, init_parameters(s.model));
    EXPECT_EQ(a.history.hash(), b.history.hash()) << objective_name(o);
    EXPECT_EQ(a.history.to_jsonl(), b.history.to_jsonl());
    EXPECT_EQ(a.best, b.best);
    ASSERT_EQ(a.history.evals.size(), 2u);
    EXPECT_EQ(a.history.evals[0].batch, 3);
    EXPECT_EQ(a.history.evals[1].batch, 6);
    EXPECT_EQ(a.history.best_hash, parameters_hash(a.best));
  }
}

TEST(Trainer, BestCheckpointIsTheMaximum) {
  const auto s = small_task();
  auto cfg = quick(Objective::kAdapet);
  cfg.total_batches = 12;
  cfg.eval_every = 2;
  std::vector<double> seen;
  const auto r = train(cfg, s.pvps, s.data.train, s.data.dev, s.vocab, init_parameters(s.model),
                       [&](const EvalRecord& e) { seen.push_back(e.dev.primary_value()); });
  ASSERT_EQ(seen.size(), 6u);
  const auto best = *std::max_element(seen.begin(), seen.end());
  EXPECT_EQ(r.history.best_metric, best);
  const auto first = std::find(seen.begin(), seen.end(), best) - seen.begin();
  EXPECT_EQ(r.history.best_batch, static_cast<int>(first + 1) * 2);
  EXPECT_NEAR(evaluate(r.best, cfg, s.pvps, s.data.dev, s.vocab).report.primary_value(), best, 1e-12);
}

TEST(Trainer, MtmpAndWicRun) {
  const auto s = small_task("paired-word-sense");
  auto cfg = quick(Objective::kAdapet);
  cfg.mtmp = true;
  const auto r = train(cfg, s.pvps, s.data.train, s.data.dev, s.vocab, init_parameters(s.model));
  EXPECT_EQ(r.history.evals.size(), 2u);
  const auto ev = evaluate(r.best, cfg, s.pvps, s.data.dev, s.vocab);
  EXPECT_EQ(ev.predictions.size(), s.data.dev.size());
}

TEST(Trainer, PetRejectsMultiTokenVerbalizers) {
  const auto vocab = fixtures::small_vocab();
  const std::vector<PVP> pvps = {fixtures::multi_token_pvp()};
  const std::vector<TaskExample> exs = {fixtures::small_rte_example()};
  EXPECT_THROW(train(quick(Objective::kPet), pvps, exs, exs, vocab,
                     init_parameters(fixtures::small_model_config())),
               Error);
  EXPECT_NO_THROW(train(quick(Objective::kAdapet), pvps, exs, exs, vocab,
                        init_parameters(fixtures::small_model_config())));
}

TEST(Trainer, EnsembleOfCopiesIsIdentity) {
  const auto vocab = fixtures::small_vocab();
  const auto params = init_parameters(fixtures::small_model_config());
  const auto pvp = fixtures::single_token_pvp();
  const auto ex = fixtures::small_rte_example();
  const auto inst = render(pvp, ex, "entailment", vocab, 32);
  const std::vector<Parameters> three = {params, params, params};
  const auto avg = ensemble_logits(three, inst);
  const auto single = forward(params, inst.ids);
  ASSERT_EQ(avg.rows(), 1);
  for (Eigen::Index v = 0; v < avg.cols(); ++v) {
    EXPECT_NEAR(avg(0, v), single.logits(static_cast<Eigen::Index>(inst.mask_positions[0]), v), 1e-6);
  }
  auto other_cfg = fixtures::small_model_config();
  other_cfg.d_ff = 64;
  const std::vector<Parameters> mixed = {params, init_parameters(other_cfg)};
  EXPECT_THROW(ensemble_logits(mixed, inst), Error);
}

TEST(Trainer, ForwardPassCounts) {
  const auto vocab = fixtures::small_vocab();
  const Model model(init_parameters(fixtures::small_model_config()));
  const std::vector<const Model*> models = {&model};
  const auto ex = fixtures::small_rte_example();
  std::size_t passes = 0;
  score_example(models, fixtures::single_token_pvp(), ex, vocab, true, &passes);
  EXPECT_EQ(passes, 2u);
  passes = 0;
  score_example(models, fixtures::multi_token_pvp(), ex, vocab, true, &passes);
  EXPECT_EQ(passes, 2u);
  passes = 0;
  score_example(models, fixtures::single_token_pvp(), ex, vocab, false, &passes);
  EXPECT_EQ(passes, 1u);
}

}  // namespace
}  // namespace clozefit
