// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include "clozefit/masking.hpp"
#include "clozefit/objectives.hpp"

namespace clozefit::fixtures {
namespace {

std::span<double> row_of(Matrix& m, std::size_t r) {
  return {m.data() + r * static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.cols())};
}

constexpr std::size_t kMaxLen = 32;

}  // namespace

Vocabulary small_vocab() {
  std::vector<std::string> tokens(kSpecialTokens.begin(), kSpecialTokens.end());
  for (int i = 0; i < 46; ++i) tokens.push_back("w" + std::to_string(i));
  return Vocabulary::from_tokens(tokens);
}

ModelConfig small_model_config() {
  ModelConfig c;
  c.vocab_size = 50;
  c.d_model = 16;
  c.n_layers = 1;
  c.n_heads = 2;
  c.d_ff = 32;
  c.max_len = kMaxLen;
  c.seed = 11;
  return c;
}

TaskExample small_rte_example() {
  TaskExample ex;
  ex.task = TaskId::kRte;
  ex.fields["premise"] = "w10 w11 w12 w13 w14 w15";
  ex.fields["hypothesis"] = "w20 w21 w22";
  ex.label = "entailment";
  return ex;
}

PVP single_token_pvp() {
  return make_pvp(TaskId::kRte, 1, "{hypothesis} w6 | ___ w7 {premise}",
                  Verbalizer::fixed({{"entailment", "w0"}, {"not_entailment", "w1"}}));
}

PVP multi_token_pvp() {
  return make_pvp(TaskId::kRte, 1, "{hypothesis} w6 | ___ w7 {premise}",
                  Verbalizer::fixed({{"entailment", "w2 w3"}, {"not_entailment", "w2 w4 w5"}}));
}

std::vector<ModelLossCase> model_loss_cases() {
  const auto vocab = small_vocab();
  const auto ex = small_rte_example();
  const auto single = single_token_pvp();
  const auto multi = multi_token_pvp();
  const std::vector<std::string> labels = {"entailment", "not_entailment"};

  std::vector<ModelLossCase> cases;

  const auto base = render(single, ex, "entailment", vocab, kMaxLen);
  const std::vector<TokenId> cands = {base.candidates[0][0], base.candidates[1][0]};
  auto single_case = [base, cands](bool pet) {
    return [base, cands, pet](const Parameters& p, Gradients* g) {
      Model m(p);
      auto f = m.forward(base.ids);
      Matrix lg = Matrix::Zero(f.logits.rows(), f.logits.cols());
      const auto pos = base.mask_positions[0];
      const double loss = pet ? pet_ce_loss(f.row(pos), cands, 0, row_of(lg, pos))
                              : decoupled_label_loss(f.row(pos), cands, 0, row_of(lg, pos));
      if (g) m.backward(f, lg, {}, *g);
      return loss;
    };
  };
  cases.push_back({"pet_ce_loss", single_case(true)});
  cases.push_back({"decoupled_label_loss", single_case(false)});

  std::vector<ClozeInstance> per_label;
  for (const auto& l : labels) per_label.push_back(render(multi, ex, l, vocab, kMaxLen));
  cases.push_back({"decoupled_label_loss_multi", [per_label](const Parameters& p, Gradients* g) {
                     Model m(p);
                     std::vector<ForwardOutput> fs;
                     std::vector<Matrix> lgs;
                     std::vector<LabelRendering> rs;
                     std::vector<GradRows> gs;
                     for (const auto& inst : per_label) {
                       fs.push_back(m.forward(inst.ids));
                       lgs.push_back(Matrix::Zero(fs.back().logits.rows(), fs.back().logits.cols()));
                     }
                     for (std::size_t y = 0; y < per_label.size(); ++y) {
                       LabelRendering r;
                       GradRows gr;
                       r.tokens = per_label[y].candidates[y];
                       for (auto pos : per_label[y].mask_positions) {
                         r.rows.push_back(fs[y].row(pos));
                         gr.push_back(row_of(lgs[y], pos));
                       }
                       rs.push_back(r);
                       gs.push_back(gr);
                     }
                     const double loss = decoupled_label_loss_multi(rs, 0, gs);
                     if (g) {
                       for (std::size_t y = 0; y < fs.size(); ++y) m.backward(fs[y], lgs[y], {}, *g);
                     }
                     return loss;
                   }});

  std::vector<ClozeInstance> conditioned;
  for (const auto& l : labels) conditioned.push_back(render_label_conditioned(single, ex, l, vocab, kMaxLen));
  Rng rng(5);
  const auto plan = sample_mask_plan(conditioned[0], MaskScheme{MaskKind::kFixed, 0.3}, rng);
  cases.push_back({"label_conditioned_mlm_loss", [conditioned, plan](const Parameters& p, Gradients* g) {
                     Model m(p);
                     std::vector<ForwardOutput> fs;
                     std::vector<Matrix> lgs;
                     std::vector<LogitRows> rows(conditioned.size());
                     std::vector<GradRows> gs(conditioned.size());
                     for (const auto& inst : conditioned) {
                       auto ids = inst.ids;
                       apply_plan(ids, project_plan(plan, inst));
                       fs.push_back(m.forward(ids));
                       lgs.push_back(Matrix::Zero(fs.back().logits.rows(), fs.back().logits.cols()));
                     }
                     for (std::size_t y = 0; y < conditioned.size(); ++y) {
                       for (auto pos : project_plan(plan, conditioned[y]).positions) {
                         rows[y].push_back(fs[y].row(pos));
                         gs[y].push_back(row_of(lgs[y], pos));
                       }
                     }
                     const double loss = label_conditioned_mlm_loss(rows, plan.originals, 0, false, gs);
                     if (g) {
                       for (std::size_t y = 0; y < fs.size(); ++y) m.backward(fs[y], lgs[y], {}, *g);
                     }
                     return loss;
                   }});

  std::vector<ClozeInstance> multi_conditioned;
  for (const auto& l : labels) multi_conditioned.push_back(render_label_conditioned(multi, ex, l, vocab, kMaxLen));
  cases.push_back({"rtd_loss", [multi_conditioned](const Parameters& p, Gradients* g) {
                     Model m(p);
                     std::vector<ForwardOutput> fs;
                     std::vector<double> scores;
                     for (const auto& inst : multi_conditioned) {
                       fs.push_back(m.forward(inst.ids));
                       double s = 0;
                       for (auto pos : inst.label_positions) s += m.rtd_score(fs.back(), pos);
                       scores.push_back(s / static_cast<double>(inst.label_positions.size()));
                     }
                     std::vector<double> ds(scores.size(), 0.0);
                     const double loss = rtd_loss(scores, 0, ds);
                     if (g) {
                       for (std::size_t y = 0; y < fs.size(); ++y) {
                         const auto& inst = multi_conditioned[y];
                         std::vector<RtdGradient> rg;
                         for (auto pos : inst.label_positions) {
                           rg.push_back({pos, ds[y] / static_cast<double>(inst.label_positions.size())});
                         }
                         m.backward(fs[y], Matrix::Zero(fs[y].logits.rows(), fs[y].logits.cols()), rg, *g);
                       }
                     }
                     return loss;
                   }});
  return cases;
}

}  // namespace clozefit::fixtures
