// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "groupcl/tensor.hpp"

namespace groupcl {

/// Named trainable arrays. std::map keeps iteration (and therefore
/// serialization and update) order deterministic.
using ParameterMap = std::map<std::string, Matrix>;

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamOptions options;
  std::uint64_t step = 0;
  ParameterMap first_moment;
  ParameterMap second_moment;
};

/// Creates zeroed moment accumulators matching `params`.
AdamState make_adam_state(const ParameterMap& params, AdamOptions options = {});

/// One bias-corrected adaptive-moment update, in place. Every parameter
/// needs a gradient of identical shape; extra gradients are rejected too.
void adam_step(ParameterMap& params, const ParameterMap& grads, AdamState& state);

}  // namespace groupcl
