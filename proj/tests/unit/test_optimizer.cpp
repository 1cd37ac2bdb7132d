// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "clozefit/optimizer.hpp"
#include "fixtures.hpp"

namespace clozefit {
namespace {

TEST(Optimizer, ScheduleAnchors) {
  EXPECT_EQ(lr_at(50, 1e-5, 0.1, 1000), 5e-6);
  EXPECT_EQ(lr_at(100, 1e-5, 0.1, 1000), 1e-5);
  EXPECT_EQ(lr_at(1000, 1e-5, 0.1, 1000), 0.0);
  EXPECT_EQ(lr_at(0, 1e-5, 0.1, 1000), 0.0);
  EXPECT_NEAR(lr_at(550, 1e-5, 0.1, 1000), 5e-6, 1e-20);
  double prev = 0;
  for (int s = 0; s <= 100; ++s) {
    const double lr = lr_at(s, 1e-5, 0.1, 1000);
    EXPECT_GE(lr, prev);
    prev = lr;
  }
}

TEST(Optimizer, ScalarClosedForm) {
  const double lr = 1e-3, eps = 1e-8;
  double theta = 0.5;
  std::vector<double> m(1, 0.0), v(1, 0.0);
  const std::vector<double> g = {1.0};
  adamw_update<double>(std::span<double>(&theta, 1), g, m, v, 1, lr, {0.9, 0.999, eps, 0.0});
  EXPECT_NEAR(theta, 0.5 - lr / (1.0 + eps), 1e-15);

  double t2 = 0.5;
  std::vector<double> m2(1, 0.0), v2(1, 0.0);
  const std::vector<double> g2 = {-3.0};
  adamw_update<double>(std::span<double>(&t2, 1), g2, m2, v2, 1, lr, {0.9, 0.999, eps, 0.1});
  const double decayed = 0.5 - lr * 0.1 * 0.5;
  EXPECT_NEAR(t2, decayed + lr * 3.0 / (3.0 + eps), 1e-15);
}

TEST(Optimizer, ZeroGradientBehaviour) {
  auto p = init_parameters(fixtures::small_model_config());
  const auto orig = p;
  auto state = AdamState::zeros_like(p);
  const auto zero = Gradients::zeros_like(p);
  adamw_step(p, zero, state, 1e-3, {0.9, 0.999, 1e-8, 0.0});
  EXPECT_EQ(p, orig);
  EXPECT_EQ(state.step, 1);

  double theta = 2.0;
  std::vector<double> m(1, 0.0), v(1, 0.0);
  const std::vector<double> g = {0.0};
  for (int s = 1; s <= 3; ++s) {
    const double before = theta;
    adamw_update<double>(std::span<double>(&theta, 1), g, m, v, s, 1e-2, {0.9, 0.999, 1e-8, 0.5});
    EXPECT_NEAR(theta, before * (1 - 1e-2 * 0.5), 1e-15);
  }
}

TEST(Optimizer, NonFiniteGradientAborts) {
  auto p = init_parameters(fixtures::small_model_config());
  const auto orig = p;
  auto state = AdamState::zeros_like(p);
  auto g = Gradients::zeros_like(p);
  g.values[3][2] = std::numeric_limits<double>::quiet_NaN();
  try {
    adamw_step(p, g, state, 1e-3, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(p.tensors[3].name), std::string::npos) << e.what();
  }
  EXPECT_EQ(p, orig);
}

}  // namespace
}  // namespace clozefit
