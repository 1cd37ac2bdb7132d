// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "clozefit/masking.hpp"
#include "clozefit/model.hpp"
#include "clozefit/objectives.hpp"
#include "clozefit/optimizer.hpp"

namespace {

using namespace clozefit;

ModelConfig bench_config() {
  ModelConfig c;
  c.vocab_size = 400;
  return c;
}

std::vector<TokenId> bench_ids(std::int64_t n) {
  std::vector<TokenId> ids;
  Rng rng(1);
  for (std::int64_t i = 0; i < n; ++i) ids.push_back(static_cast<TokenId>(rng.uniform_int(4, 399)));
  return ids;
}

void BM_Forward(benchmark::State& state) {
  const Model model(init_parameters(bench_config()));
  const auto ids = bench_ids(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(ids).logits.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

void BM_ForwardBackward(benchmark::State& state) {
  const auto params = init_parameters(bench_config());
  const Model model(params);
  const auto ids = bench_ids(state.range(0));
  auto grads = Gradients::zeros_like(params);
  const std::vector<TokenId> cands = {5, 6};
  for (auto _ : state) {
    const auto f = model.forward(ids);
    Matrix lg = Matrix::Zero(f.logits.rows(), f.logits.cols());
    std::span<double> row(lg.data(), static_cast<std::size_t>(lg.cols()));
    benchmark::DoNotOptimize(decoupled_label_loss(f.row(0), cands, 0, row));
    model.backward(f, lg, {}, grads);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(128);

void BM_DecoupledLoss(benchmark::State& state) {
  std::vector<double> logits(static_cast<std::size_t>(state.range(0)));
  Rng rng(2);
  for (auto& x : logits) x = rng.normal();
  std::vector<double> grad(logits.size());
  const std::vector<TokenId> cands = {1, 2, 3};
  for (auto _ : state) benchmark::DoNotOptimize(decoupled_label_loss(logits, cands, 0, grad));
}
BENCHMARK(BM_DecoupledLoss)->Arg(400)->Arg(4000);

void BM_AdamwStep(benchmark::State& state) {
  auto params = init_parameters(bench_config());
  auto grads = Gradients::zeros_like(params);
  for (auto& g : grads.values) std::fill(g.begin(), g.end(), 1e-3);
  auto adam = AdamState::zeros_like(params);
  for (auto _ : state) adamw_step(params, grads, adam, 1e-5, {0.9, 0.999, 1e-8, 1e-2});
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(params.count()));
}
BENCHMARK(BM_AdamwStep);

void BM_MaskPlan(benchmark::State& state) {
  ClozeInstance inst;
  for (TokenId i = 0; i < 100; ++i) {
    inst.context_positions.push_back(inst.ids.size());
    inst.ids.push_back(10 + i);
  }
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_mask_plan(inst, {}, rng).positions.data());
}
BENCHMARK(BM_MaskPlan);

}  // namespace

BENCHMARK_MAIN();
