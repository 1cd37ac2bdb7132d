// Copyright (c) 2026, The clozefit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace clozefit {

using TokenId = std::int32_t;

/// Every recoverable failure in the library surfaces as this exception type.
/// The message is a single line so the CLI can forward it verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace clozefit
