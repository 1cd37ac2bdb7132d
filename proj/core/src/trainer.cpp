// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "clozefit/checkpoint.hpp"
#include "clozefit/optimizer.hpp"
#include "json.hpp"

namespace clozefit {
namespace {

std::size_t max_len_of(const Model& model) {
  return static_cast<std::size_t>(model.config().max_len);
}

std::size_t true_label_of(const ClozeInstance& inst) {
  if (!inst.true_label) throw Error("training example has no label");
  return *inst.true_label;
}

Matrix zero_grad(const ForwardOutput& fwd) {
  return Matrix::Zero(fwd.logits.rows(), fwd.logits.cols());
}

std::span<double> matrix_row(Matrix& m, std::size_t row) {
  return {m.data() + row * static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.cols())};
}

/// Mean detection-head logit over the inserted label tokens.
double rtd_label_score(const Model& model, const ForwardOutput& fwd, const ClozeInstance& inst) {
  double s = 0.0;
  for (auto p : inst.label_positions) s += model.rtd_score(fwd, p);
  return s / static_cast<double>(inst.label_positions.size());
}

double decoupled_part(const Model& model, const TrainConfig& config, const PVP& pvp,
                      const TaskExample& example, const Vocabulary& vocab, Gradients& grads,
                      double scale) {
  const auto base = render(pvp, example, *example.label, vocab, max_len_of(model));
  const auto y_true = true_label_of(base);
  if (base.single_token()) {
    const auto fwd = model.forward(base.ids);
    Matrix lg = zero_grad(fwd);
    std::vector<TokenId> cands;
    for (const auto& c : base.candidates) cands.push_back(c[0]);
    const auto pos = base.mask_positions.at(0);
    const double loss = config.objective == Objective::kPet
                            ? pet_ce_loss(fwd.row(pos), cands, y_true, matrix_row(lg, pos))
                            : decoupled_label_loss(fwd.row(pos), cands, y_true, matrix_row(lg, pos));
    lg *= scale;
    model.backward(fwd, lg, {}, grads);
    return loss;
  }
  if (config.objective == Objective::kPet) {
    throw Error("objective pet needs single-token verbalizers");
  }
  std::vector<ClozeInstance> insts;
  std::vector<ForwardOutput> fwds;
  std::vector<Matrix> lgs;
  std::vector<LabelRendering> rends;
  std::vector<GradRows> grows;
  for (const auto& label : base.labels) {
    insts.push_back(render(pvp, example, label, vocab, max_len_of(model)));
    fwds.push_back(model.forward(insts.back().ids));
    lgs.push_back(zero_grad(fwds.back()));
  }
  for (std::size_t y = 0; y < insts.size(); ++y) {
    LabelRendering r;
    GradRows g;
    r.tokens = insts[y].candidates[y];
    for (auto p : insts[y].mask_positions) {
      r.rows.push_back(fwds[y].row(p));
      g.push_back(matrix_row(lgs[y], p));
    }
    rends.push_back(std::move(r));
    grows.push_back(std::move(g));
  }
  const double loss = decoupled_label_loss_multi(rends, y_true, grows);
  for (std::size_t y = 0; y < insts.size(); ++y) {
    lgs[y] *= scale;
    model.backward(fwds[y], lgs[y], {}, grads);
  }
  return loss;
}

double rtd_part(const Model& model, std::span<const ClozeInstance> conditioned, std::size_t y_true,
                Gradients& grads, double scale) {
  std::vector<ForwardOutput> fwds;
  std::vector<double> scores;
  for (const auto& inst : conditioned) {
    fwds.push_back(model.forward(inst.ids));
    scores.push_back(rtd_label_score(model, fwds.back(), inst));
  }
  std::vector<double> ds(scores.size(), 0.0);
  const double loss = rtd_loss(scores, y_true, ds);
  for (std::size_t y = 0; y < conditioned.size(); ++y) {
    const auto& inst = conditioned[y];
    std::vector<RtdGradient> rg;
    const double per = scale * ds[y] / static_cast<double>(inst.label_positions.size());
    for (auto p : inst.label_positions) rg.push_back({p, per});
    model.backward(fwds[y], zero_grad(fwds[y]), rg, grads);
  }
  return loss;
}

double conditioning_part(const Model& model, const TrainConfig& config,
                         std::span<const ClozeInstance> conditioned, std::size_t y_true,
                         const TfidfScores* tfidf, Rng& rng, Gradients& grads, double scale) {
  const bool positive_only = config.objective == Objective::kAdapetLcPosOnly;
  const auto& anchor = conditioned[y_true];
  MaskPlan plan;
  if (config.mask.kind == MaskKind::kTfidf) {
    if (!tfidf) throw Error("tfidf masking needs token scores");
    plan = sample_mask_plan_tfidf(anchor, config.mask, *tfidf, rng);
  } else {
    plan = sample_mask_plan(anchor, config.mask, rng);
  }
  std::vector<LogitRows> rows(conditioned.size());
  std::vector<GradRows> grows(conditioned.size());
  std::vector<ForwardOutput> fwds(conditioned.size());
  std::vector<Matrix> lgs(conditioned.size());
  for (std::size_t y = 0; y < conditioned.size(); ++y) {
    if (positive_only && y != y_true) continue;
    const auto p = project_plan(plan, conditioned[y]);
    auto ids = conditioned[y].ids;
    apply_plan(ids, p);
    fwds[y] = model.forward(ids);
    lgs[y] = zero_grad(fwds[y]);
    for (auto pos : p.positions) {
      rows[y].push_back(fwds[y].row(pos));
      grows[y].push_back(matrix_row(lgs[y], pos));
    }
  }
  const double loss = label_conditioned_mlm_loss(rows, plan.originals, y_true, positive_only, grows);
  for (std::size_t y = 0; y < conditioned.size(); ++y) {
    if (!fwds[y].cache) continue;
    lgs[y] *= scale;
    model.backward(fwds[y], lgs[y], {}, grads);
  }
  return loss;
}

std::string primary_metric_name(TaskId task) {
  switch (task_schema(task).metric) {
    case PrimaryMetric::kAccuracy: return "accuracy";
    case PrimaryMetric::kMacroF1: return "macro_f1";
    case PrimaryMetric::kF1a: return "f1a";
  }
  return "accuracy";
}

void check_same_config(std::span<const Model* const> models) {
  if (models.empty()) throw Error("no models given");
  for (const auto* m : models) {
    if (!(m->config() == models[0]->config())) {
      throw Error("ensemble members have different model configs");
    }
  }
}

}  // namespace

Objective parse_objective(std::string_view name) {
  if (name == "pet") return Objective::kPet;
  if (name == "adapet") return Objective::kAdapet;
  if (name == "adapet_no_lc") return Objective::kAdapetNoLc;
  if (name == "adapet_lc_pos_only") return Objective::kAdapetLcPosOnly;
  if (name == "rtd") return Objective::kRtd;
  throw Error("unknown objective '" + std::string(name) + "'");
}

std::string_view objective_name(Objective objective) {
  switch (objective) {
    case Objective::kPet: return "pet";
    case Objective::kAdapet: return "adapet";
    case Objective::kAdapetNoLc: return "adapet_no_lc";
    case Objective::kAdapetLcPosOnly: return "adapet_lc_pos_only";
    case Objective::kRtd: return "rtd";
  }
  return "unknown";
}

bool uses_label_conditioning(Objective objective) {
  return objective == Objective::kAdapet || objective == Objective::kAdapetLcPosOnly ||
         objective == Objective::kRtd;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw Error("train.lr must be positive");
  if (weight_decay < 0.0) throw Error("train.weight_decay must be >= 0");
  if (!(warmup_frac > 0.0 && warmup_frac < 1.0)) throw Error("train.warmup_frac must be in (0, 1)");
  if (total_batches < 1) throw Error("train.total_batches must be >= 1");
  if (batch_size < 1) throw Error("train.batch_size must be >= 1");
  if (eval_every < 1 || eval_every > total_batches) {
    throw Error("train.eval_every must be in [1, train.total_batches]");
  }
  if (pattern_index < 1) throw Error("pvp.index must be >= 1");
  mask.validate();
}

ExampleLoss accumulate_example(const Model& model, const TrainConfig& config, const PVP& pvp,
                               const TaskExample& example, const Vocabulary& vocab,
                               const TfidfScores* tfidf, Rng& rng, Gradients& grads,
                               double scale) {
  if (!example.label) throw Error("training example has no label");
  ExampleLoss out;
  std::vector<ClozeInstance> conditioned;
  std::size_t y_true = 0;
  const bool need_conditioned =
      config.objective == Objective::kRtd || uses_label_conditioning(config.objective);
  if (need_conditioned) {
    for (const auto& label : example_labels(example)) {
      conditioned.push_back(
          render_label_conditioned(pvp, example, label, vocab, max_len_of(model)));
    }
    y_true = true_label_of(conditioned.front());
  }
  if (config.objective == Objective::kRtd) {
    out.l_d = rtd_part(model, conditioned, y_true, grads, scale * config.weights.label);
  } else {
    out.l_d = decoupled_part(model, config, pvp, example, vocab, grads,
                             scale * config.weights.label);
  }
  if (uses_label_conditioning(config.objective) && config.weights.mlm != 0.0) {
    out.l_m = conditioning_part(model, config, conditioned, y_true, tfidf, rng, grads,
                                scale * config.weights.mlm);
  }
  return out;
}

Matrix ensemble_logits(std::span<const Model* const> models, const ClozeInstance& instance) {
  check_same_config(models);
  const auto V = static_cast<Eigen::Index>(models[0]->config().vocab_size);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(instance.mask_positions.size()), V);
  for (const auto* m : models) {
    const auto fwd = m->forward(instance.ids);
    for (std::size_t i = 0; i < instance.mask_positions.size(); ++i) {
      out.row(static_cast<Eigen::Index>(i)) +=
          fwd.logits.row(static_cast<Eigen::Index>(instance.mask_positions[i]));
    }
  }
  out /= static_cast<double>(models.size());
  return out;
}

Matrix ensemble_logits(std::span<const Parameters> models, const ClozeInstance& instance) {
  std::vector<Model> owned;
  owned.reserve(models.size());
  for (const auto& p : models) owned.emplace_back(p);
  std::vector<const Model*> ptrs;
  for (const auto& m : owned) ptrs.push_back(&m);
  return ensemble_logits(ptrs, instance);
}

std::vector<double> score_example(std::span<const Model* const> models, const PVP& pvp,
                                  const TaskExample& example, const Vocabulary& vocab,
                                  bool rtd_head, std::size_t* forward_passes) {
  check_same_config(models);
  const auto max_len = max_len_of(*models[0]);
  const auto labels = example_labels(example);
  auto count = [&](std::size_t n) {
    if (forward_passes) *forward_passes += n;
  };
  if (rtd_head) {
    std::vector<double> scores(labels.size(), 0.0);
    for (std::size_t y = 0; y < labels.size(); ++y) {
      const auto inst = render_label_conditioned(pvp, example, labels[y], vocab, max_len);
      for (const auto* m : models) scores[y] += rtd_label_score(*m, m->forward(inst.ids), inst);
      count(models.size());
      scores[y] /= static_cast<double>(models.size());
    }
    return scores;
  }
  const auto base = render(pvp, example, labels.front(), vocab, max_len);
  if (base.single_token()) {
    const Matrix logits = ensemble_logits(models, base);
    count(models.size());
    std::vector<TokenId> cands;
    for (const auto& c : base.candidates) cands.push_back(c[0]);
    return label_scores(std::span<const double>(logits.data(), static_cast<std::size_t>(logits.cols())),
                        cands);
  }
  std::vector<Matrix> per_label;
  std::vector<LabelRendering> rends;
  for (std::size_t y = 0; y < labels.size(); ++y) {
    const auto inst = render(pvp, example, labels[y], vocab, max_len);
    per_label.push_back(ensemble_logits(models, inst));
    count(models.size());
    LabelRendering r;
    r.tokens = inst.candidates[y];
    rends.push_back(std::move(r));
  }
  for (std::size_t y = 0; y < labels.size(); ++y) {
    const auto& m = per_label[y];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      rends[y].rows.emplace_back(m.data() + i * m.cols(), static_cast<std::size_t>(m.cols()));
    }
  }
  return label_scores(rends);
}

Evaluation evaluate(std::span<const Model* const> models, const TrainConfig& config,
                    std::span<const PVP> pvps, std::span<const TaskExample> examples,
                    const Vocabulary& vocab) {
  if (examples.empty()) throw Error("no examples to evaluate");
  if (pvps.empty()) throw Error("no patterns given");
  const auto task = examples.front().task;
  std::vector<int> indices = config.mtmp ? pattern_indices(pvps) : std::vector<int>{config.pattern_index};
  const bool rtd_head = config.objective == Objective::kRtd;

  Evaluation ev;
  std::vector<std::string> golds;
  std::vector<AnswerJudgment> judgments;
  for (const auto& ex : examples) {
    if (!ex.label) throw Error("evaluation example has no label");
    const auto labels = example_labels(ex);
    std::vector<double> total(labels.size(), 0.0);
    for (int idx : indices) {
      const auto s = score_example(models, select_pvp(pvps, idx, ex), ex, vocab, rtd_head);
      for (std::size_t y = 0; y < s.size(); ++y) total[y] += s[y];
    }
    const auto& pred = labels[predict_label(total)];
    ev.predictions.push_back(pred);
    golds.push_back(*ex.label);
    if (task == TaskId::kMultirc) {
      judgments.push_back({ex.field("passage") + "\n" + ex.field("question"), pred == "true",
                           *ex.label == "true"});
    }
  }
  auto& r = ev.report;
  r.n_examples = examples.size();
  r.metrics["accuracy"] = accuracy(ev.predictions, golds);
  if (task == TaskId::kCb) {
    r.metrics["macro_f1"] = macro_f1(ev.predictions, golds, task_schema(task).labels);
  }
  if (task == TaskId::kMultirc) {
    const auto s = multirc_em_f1a(judgments);
    r.metrics["em"] = s.em;
    r.metrics["f1a"] = s.f1a;
    r.n_questions = s.n_questions;
  }
  r.primary = primary_metric_name(task);
  return ev;
}

Evaluation evaluate(const Parameters& params, const TrainConfig& config,
                    std::span<const PVP> pvps, std::span<const TaskExample> examples,
                    const Vocabulary& vocab) {
  const Model model(params);
  const Model* ptr = &model;
  return evaluate(std::span<const Model* const>(&ptr, 1), config, pvps, examples, vocab);
}

std::string RunHistory::to_jsonl() const {
  std::string out;
  for (const auto& e : evals) {
    nlohmann::ordered_json j;
    j["batch"] = e.batch;
    j["lr"] = e.lr;
    j["loss"] = e.loss;
    j["l_d"] = e.l_d;
    j["l_m"] = e.l_m;
    nlohmann::ordered_json dev;
    for (const auto& [k, v] : e.dev.metrics) dev[k] = v;
    j["dev"] = dev;
    j["best"] = e.batch == best_batch;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::uint64_t RunHistory::hash() const {
  return fnv1a64(to_jsonl() + std::to_string(best_batch) + ":" + std::to_string(best_hash));
}

TrainResult train(const TrainConfig& config, std::span<const PVP> pvps,
                  std::span<const TaskExample> train_examples,
                  std::span<const TaskExample> dev_examples, const Vocabulary& vocab,
                  Parameters init, const std::function<void(const EvalRecord&)>& on_eval) {
  config.validate();
  if (train_examples.empty()) throw Error("no training examples");
  if (dev_examples.empty()) throw Error("no dev examples");
  if (pvps.empty()) throw Error("no patterns given");
  for (const auto& ex : train_examples) {
    if (!ex.label) throw Error("training example has no label");
  }
  const auto indices = pattern_indices(pvps);
  if (!config.mtmp && std::find(indices.begin(), indices.end(), config.pattern_index) == indices.end()) {
    throw Error("pattern index " + std::to_string(config.pattern_index) + " is not defined");
  }
  if (static_cast<std::size_t>(init.config.vocab_size) != vocab.size()) {
    throw Error("model vocab_size does not match the vocabulary");
  }

  std::vector<TfidfScores> tfidf;
  if (config.mask.kind == MaskKind::kTfidf) tfidf = tfidf_scores(train_examples, vocab);

  Rng root(config.seed);
  Rng data_rng = root.fork();
  Rng mask_rng = root.fork();
  Rng pattern_rng = root.fork();

  Parameters params = std::move(init);
  Model model(params);
  AdamState state = AdamState::zeros_like(params);
  Gradients grads = Gradients::zeros_like(params);
  const AdamConfig adam{0.9, 0.999, 1e-8, config.weight_decay};

  TrainResult result;
  result.best = params;
  bool have_best = false;
  double sum_d = 0.0, sum_m = 0.0;
  std::size_t seen = 0;
  const double scale = 1.0 / static_cast<double>(config.batch_size);
  const auto n = static_cast<std::int64_t>(train_examples.size());

  for (int b = 0; b < config.total_batches; ++b) {
    const int idx = config.mtmp ? indices[static_cast<std::size_t>(pattern_rng.uniform_int(
                                      0, static_cast<std::int64_t>(indices.size()) - 1))]
                                : config.pattern_index;
    grads.set_zero();
    for (int i = 0; i < config.batch_size; ++i) {
      const auto e = static_cast<std::size_t>(data_rng.uniform_int(0, n - 1));
      const auto& ex = train_examples[e];
      const auto loss = accumulate_example(model, config, select_pvp(pvps, idx, ex), ex, vocab,
                                           tfidf.empty() ? nullptr : &tfidf[e], mask_rng, grads,
                                           scale);
      sum_d += loss.l_d;
      sum_m += loss.l_m;
      ++seen;
    }
    const double lr = lr_at(b, config.lr, config.warmup_frac, config.total_batches);
    adamw_step(params, grads, state, lr, adam);
    model.sync(params);

    const int done = b + 1;
    if (done % config.eval_every == 0 || done == config.total_batches) {
      EvalRecord rec;
      rec.batch = done;
      rec.lr = lr;
      rec.l_d = sum_d / static_cast<double>(seen);
      rec.l_m = sum_m / static_cast<double>(seen);
      rec.loss = adapet_loss(rec.l_d, rec.l_m, config.weights).total;
      const Model* ptr = &model;
      rec.dev = evaluate(std::span<const Model* const>(&ptr, 1), config, pvps, dev_examples, vocab).report;
      if (!std::isfinite(rec.loss)) throw Error("training loss became non-finite at batch " + std::to_string(done));
      const double metric = rec.dev.primary_value();
      if (!have_best || metric > result.history.best_metric) {
        have_best = true;
        result.best = params;
        result.history.best_batch = done;
        result.history.best_metric = metric;
      }
      result.history.evals.push_back(rec);
      if (on_eval) on_eval(rec);
      sum_d = sum_m = 0.0;
      seen = 0;
    }
  }
  result.history.best_hash = parameters_hash(result.best);
  return result;
}

}  // namespace clozefit
