// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "clozefit/model.hpp"

namespace clozefit {

inline constexpr std::string_view kCheckpointMagic = "CLZFCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all integers little-endian:
///
///   magic[8] version:u32
///   vocab_size d_model n_layers n_heads d_ff max_len :i32  seed:u64
///   tensor_count:u32
///   per tensor: name_len:u32 name rank:u32 dims:u32[rank] values:f32[...]
///   checksum:u64 (FNV-1a over every preceding byte)
std::string serialize_checkpoint(const Parameters& params);
Parameters parse_checkpoint(std::string_view bytes);

void save_checkpoint(const Parameters& params, const std::filesystem::path& path);
Parameters load_checkpoint(const std::filesystem::path& path);
/// Also fails when the stored config differs from `expected`.
Parameters load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected);

std::uint64_t fnv1a64(std::string_view bytes);

/// FNV-1a 64 of the serialized checkpoint; stable across platforms.
std::uint64_t parameters_hash(const Parameters& params);

}  // namespace clozefit
