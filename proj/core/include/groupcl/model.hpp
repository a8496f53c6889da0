// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "groupcl/config.hpp"
#include "groupcl/gin.hpp"
#include "groupcl/objectives.hpp"
#include "groupcl/optim.hpp"
#include "groupcl/representor.hpp"

namespace groupcl {

/// Everything needed to continue or evaluate a run. Parameter names carry
/// a branch prefix: "u." for the main view, "r." for the auxiliary view
/// when the two views are untied.
struct ModelState {
  RunConfig config;
  std::size_t feature_dim = 0;
  ParameterMap params;   // encoders, representor, heads
  ParameterMap varnet;   // variational networks (param estimator only)
  AdamState encoder_opt;
  AdamState varnet_opt;
  std::uint64_t epoch = 0;

  friend bool operator==(const ModelState& a, const ModelState& b);
};

/// Seeded initialization from the "init" sub-stream of config.seed.
ModelState init_model(const RunConfig& config, std::size_t feature_dim);

GinShape gin_shape(const RunConfig& config, std::size_t feature_dim);
RepresentorShape representor_shape(const RunConfig& config);

/// Branch prefix used for the auxiliary view.
std::string aux_prefix(const RunConfig& config);

/// Node embeddings of one branch.
Tensor branch_nodes(ParamBinder& bind, const RunConfig& config, const Batch& batch, const std::string& prefix);

/// Graph-level embeddings of one branch: p unit-norm groups for the
/// grouping pipelines, a single unit-norm projection for the baseline.
GroupEmbeddings branch_groups(ParamBinder& bind, const RunConfig& config, const Batch& batch, const Tensor& nodes,
                              const std::string& prefix);

}  // namespace groupcl
