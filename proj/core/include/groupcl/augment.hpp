// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "groupcl/graph.hpp"
#include "groupcl/rng.hpp"

namespace groupcl {

enum class AugmentationKind { kNodeDrop, kEdgePerturb, kAttributeMask, kSubgraph };

std::string_view augmentation_name(AugmentationKind kind);
/// Accepts node-drop, edge-perturb, attribute-mask, subgraph.
AugmentationKind parse_augmentation(std::string_view name);

struct AugmentationPolicy {
  std::vector<AugmentationKind> kinds = {AugmentationKind::kNodeDrop, AugmentationKind::kAttributeMask};
  double ratio = 0.2;

  /// Throws ConfigError when no kind is enabled or ratio is outside [0, 1).
  void validate() const;
};

/// Removes floor(ratio*N) uniformly chosen nodes and their edges; survivors
/// keep their relative order.
Graph node_drop(const Graph& g, double ratio, Rng& rng);
/// Removes floor(ratio*|E|) edges and adds as many edges that were absent
/// from the input (fewer when not enough exist).
Graph edge_perturb(const Graph& g, double ratio, Rng& rng);
/// Zeroes the feature rows of floor(ratio*N) uniformly chosen nodes.
Graph attribute_mask(const Graph& g, double ratio, Rng& rng);
/// Induced subgraph on ceil((1-ratio)*N) nodes grown by random expansion
/// from a uniform seed node.
Graph subgraph_sample(const Graph& g, double ratio, Rng& rng);

Graph apply_augmentation(AugmentationKind kind, const Graph& g, double ratio, Rng& rng);
/// Uniform choice among the enabled kinds, then that augmentation.
Graph sample_view(const Graph& g, const AugmentationPolicy& policy, Rng& rng);

}  // namespace groupcl
