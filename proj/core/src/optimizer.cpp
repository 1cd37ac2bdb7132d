// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/optimizer.hpp"

#include <algorithm>

namespace clozefit {

double lr_at(std::int64_t step, double lr, double warmup_frac, std::int64_t total) {
  if (total <= 0) return 0.0;
  step = std::clamp<std::int64_t>(step, 0, total);
  const double warmup = warmup_frac * static_cast<double>(total);
  const auto s = static_cast<double>(step);
  if (s < warmup) return lr * (s / warmup);
  const double rest = static_cast<double>(total) - warmup;
  if (rest <= 0.0) return lr;
  return lr * ((static_cast<double>(total) - s) / rest);
}

AdamState AdamState::zeros_like(const Parameters& params) {
  AdamState s;
  for (const auto& t : params.tensors) {
    s.m.emplace_back(t.values.size(), 0.0);
    s.v.emplace_back(t.values.size(), 0.0);
  }
  return s;
}

void adamw_step(Parameters& params, const Gradients& grads, AdamState& state, double lr,
                const AdamConfig& cfg) {
  if (grads.values.size() != params.tensors.size() || state.m.size() != params.tensors.size()) {
    throw Error("optimizer: gradient/state layout does not match parameters");
  }
  for (std::size_t t = 0; t < grads.values.size(); ++t) {
    if (grads.values[t].size() != params.tensors[t].values.size()) {
      throw Error("optimizer: gradient shape mismatch for '" + params.tensors[t].name + "'");
    }
    for (std::size_t i = 0; i < grads.values[t].size(); ++i) {
      if (!std::isfinite(grads.values[t][i])) {
        throw Error("non-finite gradient in '" + params.tensors[t].name + "' at element " +
                    std::to_string(i) + " (step " + std::to_string(state.step + 1) +
                    ", value " + std::to_string(grads.values[t][i]) + ")");
      }
    }
  }
  ++state.step;
  for (std::size_t t = 0; t < grads.values.size(); ++t) {
    adamw_update<float>(params.tensors[t].values, grads.values[t], state.m[t], state.v[t],
                        state.step, lr, cfg);
  }
}

}  // namespace clozefit
