// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/model.hpp"

#include <cmath>
#include <numbers>

#include "clozefit/rng.hpp"

namespace clozefit {
namespace detail {

struct LayerCache {
  Matrix x_in;
  Matrix xhat1, a;
  Eigen::VectorXd rstd1;
  Matrix q, k, v, o;
  std::vector<Matrix> probs;  // one [T, T] matrix per head
  Matrix x1;
  Matrix xhat2, c;
  Eigen::VectorXd rstd2;
  Matrix u, g;
};

struct ForwardCache {
  std::vector<TokenId> ids;
  std::vector<LayerCache> layers;
  Matrix xhatf, hf;
  Eigen::VectorXd rstdf;
};

}  // namespace detail

namespace {

constexpr double kNormEps = 1e-5;
constexpr std::size_t kTensorsPerLayer = 16;

enum LayerSlot : std::size_t {
  kLn1Gain, kLn1Bias, kWq, kBq, kWk, kBk, kWv, kBv, kWo, kBo,
  kLn2Gain, kLn2Bias, kW1, kB1, kW2, kB2,
};

std::size_t layer_base(std::size_t layer) { return 2 + kTensorsPerLayer * layer; }
std::size_t final_base(const ModelConfig& c) { return layer_base(static_cast<std::size_t>(c.n_layers)); }

using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GradMap = Eigen::Map<Matrix>;
using GradRowMap = Eigen::Map<RowVector>;

Matrix load_matrix(const Tensor& t) {
  const auto rows = static_cast<Eigen::Index>(t.shape.at(0));
  const auto cols = static_cast<Eigen::Index>(t.shape.size() > 1 ? t.shape[1] : 1);
  return Eigen::Map<const FloatMatrix>(t.values.data(), rows, cols).cast<double>();
}

RowVector load_row(const Tensor& t) {
  return Eigen::Map<const Eigen::RowVectorXf>(t.values.data(),
                                              static_cast<Eigen::Index>(t.values.size()))
      .cast<double>();
}

GradMap grad_matrix(Gradients& g, std::size_t index, Eigen::Index rows, Eigen::Index cols) {
  return GradMap(g.values[index].data(), rows, cols);
}

GradRowMap grad_row(Gradients& g, std::size_t index) {
  return GradRowMap(g.values[index].data(), static_cast<Eigen::Index>(g.values[index].size()));
}

void layer_norm(const Matrix& x, const RowVector& gain, const RowVector& bias, Matrix& xhat,
                Eigen::VectorXd& rstd, Matrix& y) {
  const Eigen::VectorXd mean = x.rowwise().mean();
  xhat = x.colwise() - mean;
  const Eigen::VectorXd var = xhat.array().square().rowwise().mean();
  rstd = (var.array() + kNormEps).rsqrt();
  xhat = xhat.array().colwise() * rstd.array();
  y = (xhat.array().rowwise() * gain.array()).rowwise() + bias.array();
}

Matrix layer_norm_backward(const Matrix& dy, const Matrix& xhat, const Eigen::VectorXd& rstd,
                           const RowVector& gain, GradRowMap dgain, GradRowMap dbias) {
  dgain += (dy.array() * xhat.array()).colwise().sum().matrix();
  dbias += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * gain.array();
  const Eigen::VectorXd m1 = dxhat.rowwise().mean();
  const Eigen::VectorXd m2 = (dxhat.array() * xhat.array()).rowwise().mean();
  Matrix dx = dxhat.colwise() - m1;
  dx.array() -= xhat.array().colwise() * m2.array();
  dx.array().colwise() *= rstd.array();
  return dx;
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

double gelu(double u) {
  return 0.5 * u * (1.0 + std::tanh(kGeluC * (u + kGeluA * u * u * u)));
}

double gelu_grad(double u) {
  const double t = std::tanh(kGeluC * (u + kGeluA * u * u * u));
  return 0.5 * (1.0 + t) + 0.5 * u * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * u * u);
}

void softmax_rows(Matrix& s) {
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    auto row = s.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size <= 4) throw Error("model: vocab_size must exceed the 4 special tokens");
  if (d_model <= 0 || n_layers < 0 || n_heads <= 0 || d_ff <= 0 || max_len <= 0) {
    throw Error("model: dimensions must be positive");
  }
  if (d_model % n_heads != 0) throw Error("model: d_model must be divisible by n_heads");
}

const Tensor& Parameters::get(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw Error("no parameter named '" + std::string(name) + "'");
}

Tensor& Parameters::get(std::string_view name) {
  return const_cast<Tensor&>(std::as_const(*this).get(name));
}

std::size_t Parameters::count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.values.size();
  return n;
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> parameter_layout(
    const ModelConfig& c) {
  c.validate();
  const auto v = static_cast<std::size_t>(c.vocab_size);
  const auto d = static_cast<std::size_t>(c.d_model);
  const auto f = static_cast<std::size_t>(c.d_ff);
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out = {
      {"tok_emb", {v, d}},
      {"pos_emb", {static_cast<std::size_t>(c.max_len), d}},
  };
  for (int l = 0; l < c.n_layers; ++l) {
    const auto p = "layers." + std::to_string(l) + ".";
    out.push_back({p + "ln1.gain", {d}});
    out.push_back({p + "ln1.bias", {d}});
    out.push_back({p + "attn.wq", {d, d}});
    out.push_back({p + "attn.bq", {d}});
    out.push_back({p + "attn.wk", {d, d}});
    out.push_back({p + "attn.bk", {d}});
    out.push_back({p + "attn.wv", {d, d}});
    out.push_back({p + "attn.bv", {d}});
    out.push_back({p + "attn.wo", {d, d}});
    out.push_back({p + "attn.bo", {d}});
    out.push_back({p + "ln2.gain", {d}});
    out.push_back({p + "ln2.bias", {d}});
    out.push_back({p + "ffn.w1", {d, f}});
    out.push_back({p + "ffn.b1", {f}});
    out.push_back({p + "ffn.w2", {f, d}});
    out.push_back({p + "ffn.b2", {d}});
  }
  out.push_back({"lnf.gain", {d}});
  out.push_back({"lnf.bias", {d}});
  out.push_back({"out_bias", {v}});
  out.push_back({"rtd_head.weight", {d}});
  out.push_back({"rtd_head.bias", {1}});
  return out;
}

Parameters init_parameters(const ModelConfig& config) {
  Parameters params;
  params.config = config;
  Rng rng(config.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.d_model));
  for (auto& [name, shape] : parameter_layout(config)) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    Tensor t{name, shape, std::vector<float>(n, 0.0f)};
    const bool is_gain = name.ends_with(".gain");
    const bool is_weight_matrix = shape.size() == 2 || name == "rtd_head.weight";
    if (is_gain) {
      std::fill(t.values.begin(), t.values.end(), 1.0f);
    } else if (is_weight_matrix) {
      for (auto& x : t.values) x = static_cast<float>(scale * rng.normal());
    }
    params.tensors.push_back(std::move(t));
  }
  return params;
}

Gradients Gradients::zeros_like(const Parameters& params) {
  Gradients g;
  g.values.reserve(params.tensors.size());
  for (const auto& t : params.tensors) g.values.emplace_back(t.values.size(), 0.0);
  return g;
}

void Gradients::set_zero() {
  for (auto& v : values) std::fill(v.begin(), v.end(), 0.0);
}

void Gradients::add(const Gradients& other, double scale) {
  if (other.values.size() != values.size()) throw Error("gradient layout mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (other.values[i].size() != values[i].size()) throw Error("gradient layout mismatch");
    for (std::size_t j = 0; j < values[i].size(); ++j) values[i][j] += scale * other.values[i][j];
  }
}

void Gradients::scale(double factor) {
  for (auto& v : values) {
    for (auto& x : v) x *= factor;
  }
}

Model::Model(const Parameters& params) { sync(params); }

void Model::sync(const Parameters& params) {
  params.config.validate();
  const auto layout = parameter_layout(params.config);
  if (layout.size() != params.tensors.size()) throw Error("parameters do not match config");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].first != params.tensors[i].name || layout[i].second != params.tensors[i].shape) {
      throw Error("parameter '" + params.tensors[i].name + "' does not match config layout");
    }
  }
  config_ = params.config;
  const auto& ts = params.tensors;
  tok_emb_ = load_matrix(ts[0]);
  pos_emb_ = load_matrix(ts[1]);
  layers_.resize(static_cast<std::size_t>(config_.n_layers));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto b = layer_base(l);
    auto& L = layers_[l];
    L.ln1_gain = load_row(ts[b + kLn1Gain]);
    L.ln1_bias = load_row(ts[b + kLn1Bias]);
    L.wq = load_matrix(ts[b + kWq]);
    L.bq = load_row(ts[b + kBq]);
    L.wk = load_matrix(ts[b + kWk]);
    L.bk = load_row(ts[b + kBk]);
    L.wv = load_matrix(ts[b + kWv]);
    L.bv = load_row(ts[b + kBv]);
    L.wo = load_matrix(ts[b + kWo]);
    L.bo = load_row(ts[b + kBo]);
    L.ln2_gain = load_row(ts[b + kLn2Gain]);
    L.ln2_bias = load_row(ts[b + kLn2Bias]);
    L.w1 = load_matrix(ts[b + kW1]);
    L.b1 = load_row(ts[b + kB1]);
    L.w2 = load_matrix(ts[b + kW2]);
    L.b2 = load_row(ts[b + kB2]);
  }
  const auto f = final_base(config_);
  lnf_gain_ = load_row(ts[f]);
  lnf_bias_ = load_row(ts[f + 1]);
  out_bias_ = load_row(ts[f + 2]);
  rtd_weight_ = load_row(ts[f + 3]);
  rtd_bias_ = static_cast<double>(ts[f + 4].values.at(0));
}

ForwardOutput Model::forward(std::span<const TokenId> ids) const {
  const auto T = static_cast<Eigen::Index>(ids.size());
  if (ids.empty()) throw Error("forward: empty input");
  if (T > config_.max_len) {
    throw Error("forward: input length " + std::to_string(T) + " exceeds max_len " +
                std::to_string(config_.max_len));
  }
  const auto d = static_cast<Eigen::Index>(config_.d_model);
  const auto n_heads = static_cast<Eigen::Index>(config_.n_heads);
  const auto hd = d / n_heads;
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(hd));

  auto cache = std::make_shared<detail::ForwardCache>();
  cache->ids.assign(ids.begin(), ids.end());

  Matrix x(T, d);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto id = ids[static_cast<std::size_t>(t)];
    if (id < 0 || id >= config_.vocab_size) throw Error("forward: token id out of range");
    x.row(t) = tok_emb_.row(id) + pos_emb_.row(t);
  }

  cache->layers.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    auto& C = cache->layers[l];
    C.x_in = x;
    layer_norm(x, L.ln1_gain, L.ln1_bias, C.xhat1, C.rstd1, C.a);
    C.q = (C.a * L.wq).rowwise() + L.bq;
    C.k = (C.a * L.wk).rowwise() + L.bk;
    C.v = (C.a * L.wv).rowwise() + L.bv;
    C.o.resize(T, d);
    C.probs.resize(static_cast<std::size_t>(n_heads));
    for (Eigen::Index h = 0; h < n_heads; ++h) {
      Matrix s = C.q.middleCols(h * hd, hd) * C.k.middleCols(h * hd, hd).transpose() * att_scale;
      softmax_rows(s);
      C.o.middleCols(h * hd, hd) = s * C.v.middleCols(h * hd, hd);
      C.probs[static_cast<std::size_t>(h)] = std::move(s);
    }
    C.x1 = x + ((C.o * L.wo).rowwise() + L.bo);
    layer_norm(C.x1, L.ln2_gain, L.ln2_bias, C.xhat2, C.rstd2, C.c);
    C.u = (C.c * L.w1).rowwise() + L.b1;
    C.g = C.u.unaryExpr([](double u) { return gelu(u); });
    x = C.x1 + ((C.g * L.w2).rowwise() + L.b2);
  }

  layer_norm(x, lnf_gain_, lnf_bias_, cache->xhatf, cache->rstdf, cache->hf);
  ForwardOutput out;
  out.logits = (cache->hf * tok_emb_.transpose()).rowwise() + out_bias_;
  out.cache = std::move(cache);
  return out;
}

double Model::rtd_score(const ForwardOutput& forward, std::size_t position) const {
  if (!forward.cache) throw Error("rtd_score: forward output has no cache");
  if (position >= static_cast<std::size_t>(forward.cache->hf.rows())) {
    throw Error("rtd_score: position out of range");
  }
  return forward.cache->hf.row(static_cast<Eigen::Index>(position)).dot(rtd_weight_) + rtd_bias_;
}

void Model::backward(const ForwardOutput& forward, const Matrix& logit_grad,
                     std::span<const RtdGradient> rtd_grad, Gradients& grads) const {
  if (!forward.cache) throw Error("backward: forward output has no cache");
  const auto& cache = *forward.cache;
  const auto T = cache.hf.rows();
  const auto V = static_cast<Eigen::Index>(config_.vocab_size);
  const auto d = static_cast<Eigen::Index>(config_.d_model);
  const auto dff = static_cast<Eigen::Index>(config_.d_ff);
  const auto n_heads = static_cast<Eigen::Index>(config_.n_heads);
  const auto hd = d / n_heads;
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(hd));
  if (logit_grad.rows() != T || logit_grad.cols() != V) throw Error("backward: gradient shape mismatch");
  if (grads.values.size() != final_base(config_) + 5) throw Error("backward: gradient layout mismatch");

  const auto fb = final_base(config_);
  auto d_tok = grad_matrix(grads, 0, V, d);
  auto d_pos = grad_matrix(grads, 1, static_cast<Eigen::Index>(config_.max_len), d);

  // Tied output head.
  grad_row(grads, fb + 2) += logit_grad.colwise().sum();
  d_tok.noalias() += logit_grad.transpose() * cache.hf;
  Matrix dh = logit_grad * tok_emb_;

  auto d_rtd_w = grad_row(grads, fb + 3);
  for (const auto& rg : rtd_grad) {
    if (rg.position >= static_cast<std::size_t>(T)) throw Error("backward: rtd position out of range");
    const auto p = static_cast<Eigen::Index>(rg.position);
    d_rtd_w += rg.grad * cache.hf.row(p);
    grads.values[fb + 4][0] += rg.grad;
    dh.row(p) += rg.grad * rtd_weight_;
  }

  Matrix dx = layer_norm_backward(dh, cache.xhatf, cache.rstdf, lnf_gain_, grad_row(grads, fb),
                                  grad_row(grads, fb + 1));

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& L = layers_[li];
    const auto& C = cache.layers[li];
    const auto b = layer_base(li);

    // Feed-forward residual branch.
    grad_matrix(grads, b + kW2, dff, d).noalias() += C.g.transpose() * dx;
    grad_row(grads, b + kB2) += dx.colwise().sum();
    Matrix du = dx * L.w2.transpose();
    du.array() *= C.u.unaryExpr([](double u) { return gelu_grad(u); }).array();
    grad_matrix(grads, b + kW1, d, dff).noalias() += C.c.transpose() * du;
    grad_row(grads, b + kB1) += du.colwise().sum();
    const Matrix dc = du * L.w1.transpose();
    Matrix dx1 = dx + layer_norm_backward(dc, C.xhat2, C.rstd2, L.ln2_gain,
                                          grad_row(grads, b + kLn2Gain), grad_row(grads, b + kLn2Bias));

    // Attention residual branch.
    grad_matrix(grads, b + kWo, d, d).noalias() += C.o.transpose() * dx1;
    grad_row(grads, b + kBo) += dx1.colwise().sum();
    const Matrix d_o = dx1 * L.wo.transpose();
    Matrix dq(T, d), dk(T, d), dv(T, d);
    for (Eigen::Index h = 0; h < n_heads; ++h) {
      const auto& P = C.probs[static_cast<std::size_t>(h)];
      const auto d_oh = d_o.middleCols(h * hd, hd);
      const Matrix dp = d_oh * C.v.middleCols(h * hd, hd).transpose();
      dv.middleCols(h * hd, hd) = P.transpose() * d_oh;
      const Eigen::VectorXd row_dot = (dp.array() * P.array()).rowwise().sum();
      const Matrix ds = (P.array() * (dp.colwise() - row_dot).array()).matrix() * att_scale;
      dq.middleCols(h * hd, hd) = ds * C.k.middleCols(h * hd, hd);
      dk.middleCols(h * hd, hd) = ds.transpose() * C.q.middleCols(h * hd, hd);
    }
    grad_matrix(grads, b + kWq, d, d).noalias() += C.a.transpose() * dq;
    grad_row(grads, b + kBq) += dq.colwise().sum();
    grad_matrix(grads, b + kWk, d, d).noalias() += C.a.transpose() * dk;
    grad_row(grads, b + kBk) += dk.colwise().sum();
    grad_matrix(grads, b + kWv, d, d).noalias() += C.a.transpose() * dv;
    grad_row(grads, b + kBv) += dv.colwise().sum();
    Matrix da = dq * L.wq.transpose();
    da.noalias() += dk * L.wk.transpose();
    da.noalias() += dv * L.wv.transpose();
    dx = dx1 + layer_norm_backward(da, C.xhat1, C.rstd1, L.ln1_gain, grad_row(grads, b + kLn1Gain),
                                   grad_row(grads, b + kLn1Bias));
  }

  for (Eigen::Index t = 0; t < T; ++t) {
    d_tok.row(cache.ids[static_cast<std::size_t>(t)]) += dx.row(t);
    d_pos.row(t) += dx.row(t);
  }
}

ForwardOutput forward(const Parameters& params, std::span<const TokenId> ids) {
  return Model(params).forward(ids);
}

Gradients backward(const Parameters& params, const ForwardOutput& forward,
                   const Matrix& logit_grad) {
  Model model(params);
  auto grads = Gradients::zeros_like(params);
  model.backward(forward, logit_grad, {}, grads);
  return grads;
}

}  // namespace clozefit
