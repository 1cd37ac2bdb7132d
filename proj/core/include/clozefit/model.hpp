// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clozefit/common.hpp"

namespace clozefit {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

struct ModelConfig {
  int vocab_size = 0;
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 2;
  int d_ff = 256;
  int max_len = 128;
  std::uint64_t seed = 42;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> values;

  bool operator==(const Tensor&) const = default;
};

/// Named float32 tensors in a fixed order derived from the config.
///
/// Order: token embedding [V, d], position embedding [max_len, d]; per layer
/// ln1 gain/bias, attention wq/bq/wk/bk/wv/bv/wo/bo, ln2 gain/bias,
/// ffn w1 [d, d_ff], b1, w2 [d_ff, d], b2; final norm gain/bias, output
/// bias [V], replaced-token-detection head weight [d] and bias [1].
struct Parameters {
  ModelConfig config;
  std::vector<Tensor> tensors;

  const Tensor& get(std::string_view name) const;
  Tensor& get(std::string_view name);
  std::size_t count() const;

  bool operator==(const Parameters&) const = default;
};

/// (name, shape) of every tensor, in storage order.
std::vector<std::pair<std::string, std::vector<std::size_t>>> parameter_layout(
    const ModelConfig& config);

/// Matrices ~ N(0, 1/d_model), norm gains 1, all biases 0. Deterministic in
/// config.seed.
Parameters init_parameters(const ModelConfig& config);

/// Double-precision gradient buffer laid out like Parameters.
struct Gradients {
  std::vector<std::vector<double>> values;

  static Gradients zeros_like(const Parameters& params);
  void set_zero();
  void add(const Gradients& other, double scale = 1.0);
  void scale(double factor);
};

namespace detail {
struct ForwardCache;
}

struct ForwardOutput {
  /// [sequence length, vocab size].
  Matrix logits;
  std::shared_ptr<const detail::ForwardCache> cache;

  std::span<const double> row(std::size_t position) const {
    return {logits.data() + position * static_cast<std::size_t>(logits.cols()),
            static_cast<std::size_t>(logits.cols())};
  }
};

/// d(loss)/d(score) at one replaced-token-detection query position.
struct RtdGradient {
  std::size_t position;
  double grad;
};

/// Pre-norm bidirectional transformer encoder with a weight-tied MLM head
/// and a binary replaced-token-detection head.
class Model {
 public:
  explicit Model(const Parameters& params);

  /// Reloads weights after the float32 parameters changed.
  void sync(const Parameters& params);

  const ModelConfig& config() const { return config_; }

  ForwardOutput forward(std::span<const TokenId> ids) const;

  /// Accumulates parameter gradients for the given output gradients into
  /// `grads`. `logit_grad` has the shape of forward.logits.
  void backward(const ForwardOutput& forward, const Matrix& logit_grad,
                std::span<const RtdGradient> rtd_grad, Gradients& grads) const;

  /// Binary logit of the detection head at `position`.
  double rtd_score(const ForwardOutput& forward, std::size_t position) const;

 private:
  struct Layer {
    RowVector ln1_gain, ln1_bias;
    Matrix wq, wk, wv, wo;
    RowVector bq, bk, bv, bo;
    RowVector ln2_gain, ln2_bias;
    Matrix w1, w2;
    RowVector b1, b2;
  };

  ModelConfig config_;
  Matrix tok_emb_;
  Matrix pos_emb_;
  std::vector<Layer> layers_;
  RowVector lnf_gain_, lnf_bias_;
  RowVector out_bias_;
  RowVector rtd_weight_;
  double rtd_bias_ = 0.0;
};

ForwardOutput forward(const Parameters& params, std::span<const TokenId> ids);
Gradients backward(const Parameters& params, const ForwardOutput& forward,
                   const Matrix& logit_grad);

}  // namespace clozefit
