// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace clozefit {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

const std::map<std::string, std::string>& RunConfig::defaults() {
  static const std::map<std::string, std::string> kDefaults = {
      {"task", ""},
      {"data.train", ""},
      {"data.dev", ""},
      {"data.test", ""},
      {"synthetic.kind", ""},
      {"synthetic.seed", "42"},
      {"synthetic.vocab_seed", "7"},
      {"synthetic.n_train", "32"},
      {"synthetic.n_dev", "100"},
      {"synthetic.n_test", "200"},
      {"synthetic.noise", "0"},
      {"model.d_model", "64"},
      {"model.n_layers", "2"},
      {"model.n_heads", "2"},
      {"model.d_ff", "256"},
      {"model.max_len", "128"},
      {"vocab.min_count", "1"},
      {"train.lr", "1e-5"},
      {"train.weight_decay", "1e-2"},
      {"train.warmup_frac", "0.1"},
      {"train.total_batches", "1000"},
      {"train.batch_size", "16"},
      {"train.eval_every", "100"},
      {"seed", "42"},
      {"objective", "adapet"},
      {"mask.kind", "variable"},
      {"mask.ratio", "0.105"},
      {"pvp.index", "1"},
      {"pvp.mtmp", "false"},
      {"pvp.file", ""},
      {"loss.label_weight", "1"},
      {"loss.mlm_weight", "1"},
      {"out", ""},
      {"ablate.arms", "adapet,adapet_no_lc,adapet_lc_pos_only,pet"},
      {"ablate.mask_ratios", "0.15,0.105,0.10,0.075"},
      {"ablate.mask_kinds", "fixed,variable"},
  };
  return kDefaults;
}

RunConfig::RunConfig() : values_(defaults()) {}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      cfg.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) throw Error("unknown config key '" + std::string(key) + "'");
  it->second = trim(value);
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error("override '" + std::string(assignment) + "' must be key=value");
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) throw Error("unknown config key '" + std::string(key) + "'");
  return it->second;
}

double RunConfig::get_double(std::string_view key) const {
  const auto& v = get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error("config key '" + std::string(key) + "' expects a number, got '" + v + "'");
  }
}

std::int64_t RunConfig::get_int(std::string_view key) const {
  const auto& v = get(key);
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error("config key '" + std::string(key) + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool RunConfig::get_bool(std::string_view key) const {
  const auto& v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error("config key '" + std::string(key) + "' expects true or false, got '" + v + "'");
}

std::vector<std::string> RunConfig::get_list(std::string_view key) const {
  std::vector<std::string> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

TaskId RunConfig::task() const {
  const auto syn = synthetic();
  const auto& name = get("task");
  if (syn) {
    const auto derived = synthetic_task(syn->kind);
    if (!name.empty() && parse_task(name) != derived) {
      throw Error("task '" + name + "' does not match synthetic.kind");
    }
    return derived;
  }
  if (name.empty()) throw Error("config needs 'task' or 'synthetic.kind'");
  return parse_task(name);
}

std::optional<SyntheticSpec> RunConfig::synthetic() const {
  const auto& kind = get("synthetic.kind");
  if (kind.empty()) return std::nullopt;
  SyntheticSpec spec;
  spec.kind = parse_synthetic_kind(kind);
  spec.vocab_seed = static_cast<std::uint64_t>(get_int("synthetic.vocab_seed"));
  spec.n_train = static_cast<int>(get_int("synthetic.n_train"));
  spec.n_dev = static_cast<int>(get_int("synthetic.n_dev"));
  spec.n_test = static_cast<int>(get_int("synthetic.n_test"));
  spec.noise = get_double("synthetic.noise");
  spec.validate();
  return spec;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig c;
  c.lr = get_double("train.lr");
  c.weight_decay = get_double("train.weight_decay");
  c.warmup_frac = get_double("train.warmup_frac");
  c.total_batches = static_cast<int>(get_int("train.total_batches"));
  c.batch_size = static_cast<int>(get_int("train.batch_size"));
  c.eval_every = static_cast<int>(get_int("train.eval_every"));
  c.seed = static_cast<std::uint64_t>(get_int("seed"));
  c.objective = parse_objective(get("objective"));
  c.mask.kind = parse_mask_kind(get("mask.kind"));
  c.mask.ratio = get_double("mask.ratio");
  c.pattern_index = static_cast<int>(get_int("pvp.index"));
  c.mtmp = get_bool("pvp.mtmp");
  c.weights.label = get_double("loss.label_weight");
  c.weights.mlm = get_double("loss.mlm_weight");
  c.validate();
  return c;
}

ModelConfig RunConfig::model_config(std::size_t vocab_size) const {
  ModelConfig m;
  m.vocab_size = static_cast<int>(vocab_size);
  m.d_model = static_cast<int>(get_int("model.d_model"));
  m.n_layers = static_cast<int>(get_int("model.n_layers"));
  m.n_heads = static_cast<int>(get_int("model.n_heads"));
  m.d_ff = static_cast<int>(get_int("model.d_ff"));
  m.max_len = static_cast<int>(get_int("model.max_len"));
  m.seed = static_cast<std::uint64_t>(get_int("seed"));
  m.validate();
  return m;
}

void RunConfig::validate() const {
  task();
  train_config();
  model_config(SpecialIds::kCount + 1);
  if (get_int("vocab.min_count") < 1) throw Error("vocab.min_count must be >= 1");
  if (get_int("synthetic.seed") < 0) throw Error("synthetic.seed must be >= 0");
  if (!synthetic()) {
    for (const char* key : {"data.train", "data.dev"}) {
      if (get(key).empty()) throw Error(std::string(key) + " is required without synthetic.kind");
    }
  }
  for (const char* key : {"data.train", "data.dev", "data.test", "pvp.file"}) {
    const auto& p = get(key);
    if (!p.empty() && !std::filesystem::exists(p)) throw Error(std::string(key) + ": no such file " + p);
  }
  for (const auto& a : get_list("ablate.arms")) parse_objective(a);
  for (const auto& k : get_list("ablate.mask_kinds")) parse_mask_kind(k);
  for (const auto& r : get_list("ablate.mask_ratios")) {
    MaskScheme s;
    try {
      s.ratio = std::stod(r);
    } catch (const std::exception&) {
      throw Error("ablate.mask_ratios: bad ratio '" + r + "'");
    }
    s.validate();
  }
}

}  // namespace clozefit
