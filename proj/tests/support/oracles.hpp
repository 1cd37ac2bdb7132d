// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

// Reference computations written independently of the library code they
// check. Nothing here calls into clozefit's objectives, metrics or masking.

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "clozefit/model.hpp"

namespace clozefit::oracle {

/// Softmax probability of index z, computed in long double without clamping.
double softmax_at(std::span<const double> logits, std::size_t z);

/// The same, clamped to [1e-7, 1 - 1e-7].
double clamped_prob(std::span<const double> logits, std::size_t z);

/// -ln q(y*) - sum_{y != y*} ln(1 - q(y)), term by term.
double decoupled_literal(std::span<const double> logits, std::span<const int> label_tokens,
                         std::size_t true_label);

/// -ln of the label-restricted softmax.
double pet_literal(std::span<const double> logits, std::span<const int> label_tokens,
                   std::size_t true_label);

double sigmoid(double x);

/// Closed-form parameter count of the tiny model.
std::size_t parameter_count(std::size_t vocab, std::size_t d_model, std::size_t n_layers,
                            std::size_t d_ff, std::size_t max_len);

struct FdReport {
  double max_rel = 0.0;
  std::string worst_tensor;
  std::size_t checked = 0;
};

/// Central differences over every float32 parameter (step 1e-3, divided by
/// the realised float step). Per tensor the error is
/// max|a - n| / max(max|a|, max|n|, 1e-6); the report keeps the worst tensor.
FdReport finite_difference_check(const Parameters& params,
                                 const std::function<double(const Parameters&)>& loss,
                                 const Gradients& analytic, double step = 1e-3);

/// Central differences of a scalar function of a double vector.
std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double step = 1e-5);

/// Whitespace/punctuation-agnostic distinct-token count: lowercases, splits
/// on spaces, and separates ASCII punctuation.
std::size_t distinct_tokens(const std::vector<std::string>& corpus);

/// Hand tallies for the metric fixtures.
double tally_accuracy(const std::vector<std::string>& p, const std::vector<std::string>& g);
double tally_macro_f1(const std::vector<std::string>& p, const std::vector<std::string>& g,
                      const std::vector<std::string>& labels);

}  // namespace clozefit::oracle
