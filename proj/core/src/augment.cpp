// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "groupcl/error.hpp"

namespace groupcl {

namespace {

// Count helpers tolerate representation error such as 0.7*10 = 6.9999...
std::size_t floor_count(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

std::size_t ceil_count(double x) { return static_cast<std::size_t>(std::ceil(x - 1e-9)); }

void check_ratio(const char* op, double ratio) {
  if (!(ratio >= 0.0 && ratio < 1.0)) throw ContractError(std::string(op) + ": ratio must lie in [0, 1)");
}

Graph induced(const Graph& g, const std::vector<bool>& keep) {
  std::vector<std::size_t> remap(g.num_nodes(), 0);
  std::size_t kept = 0;
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    if (keep[v]) remap[v] = kept++;
  Matrix x(kept, g.feature_dim());
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    if (keep[v]) std::copy_n(g.features().row_span(v).begin(), g.feature_dim(), x.row_span(remap[v]).begin());
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edges())
    if (keep[u] && keep[v]) edges.emplace_back(remap[u], remap[v]);
  return Graph(kept, std::move(x), std::move(edges), g.label());
}

}  // namespace

std::string_view augmentation_name(AugmentationKind kind) {
  switch (kind) {
    case AugmentationKind::kNodeDrop: return "node-drop";
    case AugmentationKind::kEdgePerturb: return "edge-perturb";
    case AugmentationKind::kAttributeMask: return "attribute-mask";
    case AugmentationKind::kSubgraph: return "subgraph";
  }
  return "unknown";
}

AugmentationKind parse_augmentation(std::string_view name) {
  for (auto kind : {AugmentationKind::kNodeDrop, AugmentationKind::kEdgePerturb, AugmentationKind::kAttributeMask,
                    AugmentationKind::kSubgraph}) {
    if (augmentation_name(kind) == name) return kind;
  }
  throw ConfigError("unknown augmentation kind '" + std::string(name) + "'");
}

void AugmentationPolicy::validate() const {
  if (kinds.empty()) throw ConfigError("augmentation policy enables no kinds");
  if (!(ratio >= 0.0 && ratio < 1.0)) throw ConfigError("augmentation ratio must lie in [0, 1)");
}

Graph node_drop(const Graph& g, double ratio, Rng& rng) {
  check_ratio("node_drop", ratio);
  const std::size_t n = g.num_nodes();
  const std::size_t drop = floor_count(ratio, n);
  if (drop >= n) throw ContractError("node_drop: all nodes would be dropped");
  if (drop == 0) return g;
  std::vector<bool> keep(n, true);
  for (std::size_t v : rng.sample_without_replacement(n, drop)) keep[v] = false;
  return induced(g, keep);
}

Graph edge_perturb(const Graph& g, double ratio, Rng& rng) {
  check_ratio("edge_perturb", ratio);
  if (g.edges().empty()) throw ContractError("edge_perturb: graph has no edges");
  const std::size_t m = floor_count(ratio, g.edges().size());
  if (m == 0) return g;

  std::set<Edge> present;
  for (const auto& [u, v] : g.edges()) present.insert(u < v ? Edge{u, v} : Edge{v, u});
  std::vector<Edge> absent;
  for (std::size_t u = 0; u < g.num_nodes(); ++u)
    for (std::size_t v = u + 1; v < g.num_nodes(); ++v)
      if (!present.contains({u, v})) absent.emplace_back(u, v);

  std::vector<bool> removed(g.edges().size(), false);
  for (std::size_t i : rng.sample_without_replacement(g.edges().size(), m)) removed[i] = true;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < g.edges().size(); ++i)
    if (!removed[i]) edges.push_back(g.edges()[i]);
  for (std::size_t i : rng.sample_without_replacement(absent.size(), std::min(m, absent.size()))) {
    edges.push_back(absent[i]);
  }
  return Graph(g.num_nodes(), g.features(), std::move(edges), g.label());
}

Graph attribute_mask(const Graph& g, double ratio, Rng& rng) {
  check_ratio("attribute_mask", ratio);
  const std::size_t k = floor_count(ratio, g.num_nodes());
  if (k == 0) return g;
  Matrix x = g.features();
  for (std::size_t v : rng.sample_without_replacement(g.num_nodes(), k)) {
    std::fill(x.row_span(v).begin(), x.row_span(v).end(), 0.0);
  }
  return Graph(g.num_nodes(), std::move(x), g.edges(), g.label());
}

Graph subgraph_sample(const Graph& g, double ratio, Rng& rng) {
  check_ratio("subgraph_sample", ratio);
  const std::size_t n = g.num_nodes();
  if (n < 2) throw ContractError("subgraph_sample: need at least 2 nodes");
  const std::size_t target = std::max<std::size_t>(1, ceil_count((1.0 - ratio) * static_cast<double>(n)));
  if (target >= n) return g;

  const auto nbrs = g.neighbor_lists();
  std::vector<bool> keep(n, false);
  std::size_t kept = 0;
  auto take = [&](std::size_t v) {
    keep[v] = true;
    ++kept;
  };
  take(rng.index(n));
  while (kept < target) {
    // Frontier in ascending node order so draws depend only on the rng.
    std::vector<std::size_t> frontier;
    std::vector<bool> listed(n, false);
    for (std::size_t v = 0; v < n; ++v) {
      if (!keep[v]) continue;
      for (std::size_t u : nbrs[v])
        if (!keep[u] && !listed[u]) {
          listed[u] = true;
          frontier.push_back(u);
        }
    }
    std::sort(frontier.begin(), frontier.end());
    if (frontier.empty()) {
      // Component exhausted: restart from a fresh node.
      std::vector<std::size_t> rest;
      for (std::size_t v = 0; v < n; ++v)
        if (!keep[v]) rest.push_back(v);
      take(rest[rng.index(rest.size())]);
    } else {
      take(frontier[rng.index(frontier.size())]);
    }
  }
  return induced(g, keep);
}

Graph apply_augmentation(AugmentationKind kind, const Graph& g, double ratio, Rng& rng) {
  switch (kind) {
    case AugmentationKind::kNodeDrop: return node_drop(g, ratio, rng);
    case AugmentationKind::kEdgePerturb: return edge_perturb(g, ratio, rng);
    case AugmentationKind::kAttributeMask: return attribute_mask(g, ratio, rng);
    case AugmentationKind::kSubgraph: return subgraph_sample(g, ratio, rng);
  }
  throw ContractError("apply_augmentation: unknown kind");
}

Graph sample_view(const Graph& g, const AugmentationPolicy& policy, Rng& rng) {
  policy.validate();
  const AugmentationKind kind = policy.kinds[rng.index(policy.kinds.size())];
  // Graphs outside a kind's precondition pass through unchanged.
  if (kind == AugmentationKind::kEdgePerturb && g.edges().empty()) return g;
  if (kind == AugmentationKind::kSubgraph && g.num_nodes() < 2) return g;
  return apply_augmentation(kind, g, policy.ratio, rng);
}

}  // namespace groupcl
