// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "clozefit/checkpoint.hpp"
#include "clozefit/rng.hpp"
#include "fixtures.hpp"

namespace clozefit {
namespace {

Parameters random_params() {
  auto p = init_parameters(fixtures::small_model_config());
  Rng rng(77);
  for (auto& t : p.tensors) {
    for (auto& v : t.values) v = static_cast<float>(rng.normal());
  }
  return p;
}

TEST(Checkpoint, RoundTripIsBitIdentical) {
  const auto p = random_params();
  const auto bytes = serialize_checkpoint(p);
  const auto q = parse_checkpoint(bytes);
  EXPECT_EQ(q, p);
  EXPECT_EQ(serialize_checkpoint(q), bytes);
  EXPECT_EQ(bytes.substr(0, 8), "CLZFCKPT");

  const auto path = std::filesystem::temp_directory_path() / "clozefit_ckpt_test.bin";
  save_checkpoint(p, path);
  const auto r = load_checkpoint(path, p.config);
  for (std::size_t t = 0; t < p.tensors.size(); ++t) {
    ASSERT_EQ(std::memcmp(p.tensors[t].values.data(), r.tensors[t].values.data(),
                          p.tensors[t].values.size() * sizeof(float)),
              0);
  }
  auto other = p.config;
  other.d_ff = 64;
  EXPECT_THROW(load_checkpoint(path, other), Error);
  std::filesystem::remove(path);
}

TEST(Checkpoint, CorruptionIsDetected) {
  const auto bytes = serialize_checkpoint(random_params());
  auto tail = bytes;
  tail.back() = static_cast<char>(tail.back() ^ 0x1);
  EXPECT_THROW(parse_checkpoint(tail), Error);
  auto mid = bytes;
  mid[bytes.size() / 2] = static_cast<char>(mid[bytes.size() / 2] ^ 0x40);
  EXPECT_THROW(parse_checkpoint(mid), Error);
  EXPECT_THROW(parse_checkpoint(bytes.substr(0, bytes.size() - 3)), Error);
  EXPECT_THROW(parse_checkpoint(bytes + "x"), Error);
  auto version = bytes;
  version[8] = 2;
  EXPECT_THROW(parse_checkpoint(version), Error);
  EXPECT_THROW(parse_checkpoint("NOTACKPT"), Error);
  EXPECT_THROW(load_checkpoint("/nonexistent/clozefit.ckpt"), Error);
}

TEST(Checkpoint, HashTracksContent) {
  auto p = random_params();
  const auto h = parameters_hash(p);
  EXPECT_EQ(h, parameters_hash(p));
  p.tensors[0].values[0] += 1.0f;
  EXPECT_NE(h, parameters_hash(p));
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

}  // namespace
}  // namespace clozefit
