// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Binary checkpoint layout (all integers and floats little-endian):
//
//   magic   "GRPCLCKP"                     8 bytes
//   version u32                            currently 1
//   config  u64 length + UTF-8 text        RunConfig::to_text()
//   u64 feature_dim, u64 epoch, u64 encoder_step, u64 varnet_step
//   u64 tensor count, then per tensor:     u32 name length, name, u64 rows, u64 cols
//   payload: every tensor's values as f64, in table order
//
// Anything short of or beyond the declared payload is rejected.

#pragma once

#include <filesystem>
#include <iosfwd>

#include "groupcl/model.hpp"

namespace groupcl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const ModelState& state, std::ostream& out);
ModelState read_checkpoint(std::istream& in);

void checkpoint_save(const std::filesystem::path& path, const ModelState& state);
ModelState checkpoint_load(const std::filesystem::path& path);

}  // namespace groupcl
