// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clozefit/model.hpp"

namespace clozefit {

/// Linear warmup from 0 to `lr` over the first warmup_frac * total steps,
/// then linear decay to 0 at `total`.
double lr_at(std::int64_t step, double lr, double warmup_frac, std::int64_t total);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// One AdamW update of a flat array. `step` is 1-based. Weight decay is
/// decoupled: theta <- theta - lr * wd * theta before the Adam step.
template <typename T>
void adamw_update(std::span<T> theta, std::span<const double> grad, std::span<double> m,
                  std::span<double> v, std::int64_t step, double lr, const AdamConfig& cfg) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double x = static_cast<double>(theta[i]);
    x -= lr * cfg.weight_decay * x;
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    x -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    theta[i] = static_cast<T>(x);
  }
}

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t step = 0;

  static AdamState zeros_like(const Parameters& params);
};

/// Applies one AdamW step to every tensor. Throws, naming the tensor and
/// element, if any gradient is non-finite; parameters are left untouched.
void adamw_step(Parameters& params, const Gradients& grads, AdamState& state, double lr,
                const AdamConfig& cfg);

}  // namespace clozefit
