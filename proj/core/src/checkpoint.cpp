// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include "clozefit/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace clozefit {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error("checkpoint truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_checkpoint(const Parameters& params) {
  std::string out(kCheckpointMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  const auto& c = params.config;
  for (int v : {c.vocab_size, c.d_model, c.n_layers, c.n_heads, c.d_ff, c.max_len}) {
    put<std::int32_t>(out, v);
  }
  put<std::uint64_t>(out, c.seed);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.tensors.size()));
  for (const auto& t : params.tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    out.append(reinterpret_cast<const char*>(t.values.data()), t.values.size() * sizeof(float));
  }
  put<std::uint64_t>(out, fnv1a64(out));
  return out;
}

Parameters parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < kCheckpointMagic.size() || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw Error("not a checkpoint file (bad magic)");
  }
  if (bytes.size() < kCheckpointMagic.size() + 4 + sizeof(std::uint64_t)) throw Error("checkpoint truncated");
  Reader r(bytes.substr(0, bytes.size() - sizeof(std::uint64_t)));
  r.take(kCheckpointMagic.size());
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(version));
  }
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - sizeof(stored), sizeof(stored));
  if (stored != fnv1a64(bytes.substr(0, bytes.size() - sizeof(stored)))) {
    throw Error("checkpoint checksum mismatch (corrupted or truncated file)");
  }

  Parameters p;
  auto& c = p.config;
  c.vocab_size = r.get<std::int32_t>();
  c.d_model = r.get<std::int32_t>();
  c.n_layers = r.get<std::int32_t>();
  c.n_heads = r.get<std::int32_t>();
  c.d_ff = r.get<std::int32_t>();
  c.max_len = r.get<std::int32_t>();
  c.seed = r.get<std::uint64_t>();
  const auto layout = parameter_layout(c);
  const auto count = r.get<std::uint32_t>();
  if (count != layout.size()) throw Error("checkpoint tensor count does not match its config");
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor t;
    t.name = std::string(r.take(r.get<std::uint32_t>()));
    const auto rank = r.get<std::uint32_t>();
    std::size_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      t.shape.push_back(r.get<std::uint32_t>());
      n *= t.shape.back();
    }
    if (t.name != layout[i].first || t.shape != layout[i].second) {
      throw Error("checkpoint tensor '" + t.name + "' does not match its config");
    }
    const auto raw = r.take(n * sizeof(float));
    t.values.resize(n);
    std::memcpy(t.values.data(), raw.data(), raw.size());
    p.tensors.push_back(std::move(t));
  }
  if (r.remaining() != 0) throw Error("checkpoint has trailing bytes");
  return p;
}

void save_checkpoint(const Parameters& params, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

Parameters load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_checkpoint(buf.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

Parameters load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected) {
  auto p = load_checkpoint(path);
  if (!(p.config == expected)) {
    throw Error(path.string() + ": checkpoint config does not match the expected model config");
  }
  return p;
}

std::uint64_t parameters_hash(const Parameters& params) {
  return fnv1a64(serialize_checkpoint(params));
}

}  // namespace clozefit
