// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace clozefit::oracle {

double softmax_at(std::span<const double> logits, std::size_t z) {
  long double mx = logits[0];
  for (double l : logits) mx = std::max<long double>(mx, l);
  long double denom = 0;
  for (double l : logits) denom += std::exp(static_cast<long double>(l) - mx);
  return static_cast<double>(std::exp(static_cast<long double>(logits[z]) - mx) / denom);
}

double clamped_prob(std::span<const double> logits, std::size_t z) {
  return std::min(std::max(softmax_at(logits, z), 1e-7), 1.0 - 1e-7);
}

double decoupled_literal(std::span<const double> logits, std::span<const int> label_tokens,
                         std::size_t true_label) {
  double positive = -std::log(clamped_prob(logits, static_cast<std::size_t>(label_tokens[true_label])));
  double negative = 0.0;
  for (std::size_t y = 0; y < label_tokens.size(); ++y) {
    if (y == true_label) continue;
    negative += -std::log(1.0 - clamped_prob(logits, static_cast<std::size_t>(label_tokens[y])));
  }
  return positive + negative;
}

double pet_literal(std::span<const double> logits, std::span<const int> label_tokens,
                   std::size_t true_label) {
  std::vector<double> sub;
  for (int t : label_tokens) sub.push_back(logits[static_cast<std::size_t>(t)]);
  return -std::log(softmax_at(sub, true_label));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t parameter_count(std::size_t V, std::size_t d, std::size_t L, std::size_t f,
                            std::size_t max_len) {
  const std::size_t embeddings = V * d + max_len * d;
  const std::size_t norms_per_layer = 2 * (2 * d);
  const std::size_t attention = 4 * (d * d + d);
  const std::size_t ffn = d * f + f + f * d + d;
  const std::size_t head = 2 * d + V + d + 1;
  return embeddings + L * (norms_per_layer + attention + ffn) + head;
}

FdReport finite_difference_check(const Parameters& params,
                                 const std::function<double(const Parameters&)>& loss,
                                 const Gradients& analytic, double step) {
  FdReport report;
  Parameters probe = params;
  for (std::size_t t = 0; t < params.tensors.size(); ++t) {
    double max_a = 0, max_n = 0, max_diff = 0;
    auto& values = probe.tensors[t].values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const float x = values[i];
      const float hi = static_cast<float>(x + step);
      const float lo = static_cast<float>(x - step);
      values[i] = hi;
      const double lp = loss(probe);
      values[i] = lo;
      const double lm = loss(probe);
      values[i] = x;
      const double numeric = (lp - lm) / (static_cast<double>(hi) - static_cast<double>(lo));
      const double a = analytic.values[t][i];
      max_a = std::max(max_a, std::abs(a));
      max_n = std::max(max_n, std::abs(numeric));
      max_diff = std::max(max_diff, std::abs(a - numeric));
      ++report.checked;
    }
    const double rel = max_diff / std::max({max_a, max_n, 1e-6});
    if (rel > report.max_rel || report.worst_tensor.empty()) {
      report.max_rel = rel;
      report.worst_tensor = params.tensors[t].name;
    }
  }
  return report;
}

std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + step;
    const double fp = f(x);
    x[i] = keep - step;
    const double fm = f(x);
    x[i] = keep;
    g[i] = (fp - fm) / (2 * step);
  }
  return g;
}

std::size_t distinct_tokens(const std::vector<std::string>& corpus) {
  std::set<std::string> seen;
  for (const auto& text : corpus) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) seen.insert(cur);
      cur.clear();
    };
    for (char c : text) {
      const auto u = static_cast<unsigned char>(c);
      if (std::isspace(u)) {
        flush();
      } else if (std::ispunct(u)) {
        flush();
        seen.insert(std::string(1, c));
      } else {
        cur.push_back(static_cast<char>(std::tolower(u)));
      }
    }
    flush();
  }
  return seen.size();
}

double tally_accuracy(const std::vector<std::string>& p, const std::vector<std::string>& g) {
  std::map<std::pair<std::string, std::string>, int> confusion;
  for (std::size_t i = 0; i < p.size(); ++i) ++confusion[{p[i], g[i]}];
  int diag = 0;
  for (const auto& [k, n] : confusion) {
    if (k.first == k.second) diag += n;
  }
  return static_cast<double>(diag) / static_cast<double>(p.size());
}

double tally_macro_f1(const std::vector<std::string>& p, const std::vector<std::string>& g,
                      const std::vector<std::string>& labels) {
  double sum = 0;
  for (const auto& c : labels) {
    double tp = 0, pred = 0, gold = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      tp += (p[i] == c && g[i] == c);
      pred += p[i] == c;
      gold += g[i] == c;
    }
    sum += (pred + gold) == 0 ? 0.0 : 2 * tp / (pred + gold);
  }
  return sum / static_cast<double>(labels.size());
}

}  // namespace clozefit::oracle
