// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0
//
// GIN node encoder and the sum-readout projection head of the non-grouping
// baseline.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "groupcl/graph.hpp"
#include "groupcl/params.hpp"

namespace groupcl {

/// One GIN layer: out[v] = MLP((1 + eps) * h[v] + sum_{u in N(v)} h[u]) with
/// MLP(x) = relu(x W1 + b1) W2 + b2. `eps` is 1×1.
struct GinLayer {
  Tensor w1, b1, w2, b2;
  Tensor eps;
};

struct GinEncoder {
  std::vector<GinLayer> layers;
  /// Linear map from the last hidden width to the representor input width,
  /// present only when the two differ.
  std::optional<Tensor> lift;
};

struct GinShape {
  std::size_t input_dim = 0;
  std::size_t hidden = 32;
  std::size_t layers = 3;
  /// Representor input width d_n; 0 means "same as hidden".
  std::size_t output_dim = 0;
  bool learn_eps = false;

  std::size_t output_width() const;
};

void init_gin(ParameterMap& params, const std::string& prefix, const GinShape& shape, Rng& rng);
GinEncoder bind_gin(ParamBinder& bind, const std::string& prefix, const GinShape& shape);

Tensor gin_layer(const Tensor& h, const Batch& batch, const GinLayer& layer);
/// Applies every layer, then the optional lift. Zero layers return `x`.
Tensor encode_nodes(const Tensor& x, const Batch& batch, const GinEncoder& encoder);

/// Two bias-free dense layers with a ReLU between.
struct ProjectionHead {
  Tensor w1, w2;
};

void init_projection_head(ParameterMap& params, const std::string& prefix, std::size_t input_dim, std::size_t width,
                          Rng& rng);
ProjectionHead bind_projection_head(ParamBinder& bind, const std::string& prefix);

/// Per-graph sum of node rows followed by the head: B × width.
Tensor readout_projection(const Tensor& nodes, const Batch& batch, const ProjectionHead& head);

}  // namespace groupcl
