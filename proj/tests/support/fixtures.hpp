// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "clozefit/model.hpp"
#include "clozefit/pvp.hpp"

namespace clozefit::fixtures {

/// 46 words "w0".."w45" plus the specials: a 50-token vocabulary.
Vocabulary small_vocab();

/// d_model 16, one layer, two heads, vocab 50.
ModelConfig small_model_config();

/// An RTE example made of small_vocab words.
TaskExample small_rte_example();

/// RTE PVPs over small_vocab words: single-token "w0"/"w1" and multi-token
/// "w2 w3" / "w2 w4 w5".
PVP single_token_pvp();
PVP multi_token_pvp();

/// A scalar loss through the whole model. With `grads` set it also adds
/// the analytic gradient.
struct ModelLossCase {
  std::string name;
  std::function<double(const Parameters&, Gradients*)> run;
};

/// pet_ce, decoupled (single and multi-token), label-conditioned MLM and
/// RTD, each composed from forward, the loss and backward.
std::vector<ModelLossCase> model_loss_cases();

}  // namespace clozefit::fixtures
