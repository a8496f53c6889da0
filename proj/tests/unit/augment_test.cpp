// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <queue>

#include "groupcl/augment.hpp"
#include "groupcl/error.hpp"
#include "support/test_support.hpp"

namespace groupcl {
namespace {

bool connected(const Graph& g) {
  const auto nbrs = g.neighbor_lists();
  std::vector<bool> seen(g.num_nodes(), false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (auto u : nbrs[v])
      if (!seen[u]) {
        seen[u] = true;
        ++count;
        q.push(u);
      }
  }
  return count == g.num_nodes();
}

TEST(Augment, ZeroRatioIsIdentity) {
  Rng data(1);
  const Graph g = testing::random_graph(9, 3, 0.4, data);
  for (auto kind : {AugmentationKind::kNodeDrop, AugmentationKind::kEdgePerturb, AugmentationKind::kAttributeMask}) {
    Rng rng(2);
    EXPECT_EQ(apply_augmentation(kind, g, 0.0, rng), g) << augmentation_name(kind);
  }
}

TEST(Augment, NodeDropFloorArithmetic) {
  Rng rng(3);
  EXPECT_EQ(node_drop(testing::path_graph(10), 0.2, rng).num_nodes(), 8u);
}

TEST(Augment, NodeDropReindexesSurvivors) {
  // Enumerate: dropping node 1 of the triangle leaves nodes {0,2} joined by the former (2,0).
  const Graph g = testing::triangle();
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    Rng rng(seed);
    const Graph h = node_drop(g, 1.0 / 3.0, rng);
    ASSERT_EQ(h.num_nodes(), 2u);
    EXPECT_EQ(h.edges().size(), 1u);
    EXPECT_TRUE(h.has_edge(0, 1));
  }
}

TEST(Augment, NodeDropRejectsDroppingEverything) {
  Rng rng(4);
  // Any ratio below one keeps a node unless rounding pushes the count to N.
  EXPECT_EQ(node_drop(Graph(1, Matrix(1, 1), {}), 0.99, rng).num_nodes(), 1u);
  EXPECT_THROW(node_drop(Graph(1, Matrix(1, 1), {}), 1.0 - 1e-12, rng), ContractError);
}

TEST(Augment, EdgePerturbOnCompleteGraphOnlyRemoves) {
  Rng rng(5);
  const Graph h = edge_perturb(testing::triangle(), 1.0 / 3.0, rng);
  EXPECT_EQ(h.num_nodes(), 3u);
  EXPECT_EQ(h.edges().size(), 2u);
}

TEST(Augment, EdgePerturbKeepsEdgeCountWhenRoomExists) {
  Rng rng(6);
  const Graph g = testing::path_graph(10);
  const Graph h = edge_perturb(g, 0.3, rng);
  EXPECT_EQ(h.edges().size(), g.edges().size());
  EXPECT_EQ(h.num_nodes(), 10u);
}

TEST(Augment, AttributeMaskZeroesExactRows) {
  Rng data(7);
  const Graph g = testing::random_graph(5, 3, 0.5, data);
  Rng rng(8);
  const Graph h = attribute_mask(g, 0.4, rng);
  std::size_t zero_rows = 0;
  for (std::size_t v = 0; v < 5; ++v) {
    bool zero = true;
    for (double x : h.features().row_span(v)) zero = zero && x == 0.0;
    zero_rows += zero ? 1 : 0;
  }
  EXPECT_EQ(zero_rows, 2u);
  EXPECT_EQ(h.edges(), g.edges());
}

TEST(Augment, SubgraphOnPathIsContiguous) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Graph h = subgraph_sample(testing::path_graph(10), 0.5, rng);
    EXPECT_EQ(h.num_nodes(), 5u);
    EXPECT_EQ(h.edges().size(), 4u);
    EXPECT_TRUE(connected(h));
  }
}

TEST(Augment, SubgraphZeroRatioKeepsConnectedGraph) {
  Rng rng(9);
  const Graph g = testing::path_graph(6);
  const Graph h = subgraph_sample(g, 0.0, rng);
  EXPECT_EQ(h.num_nodes(), 6u);
  EXPECT_EQ(h.edges().size(), 5u);
}

TEST(Augment, SampleViewIsSeededAndPolicyChecked) {
  Rng data(10);
  const Graph g = testing::random_graph(10, 3, 0.3, data);
  const AugmentationPolicy policy;
  Rng a(11), b(11);
  EXPECT_EQ(sample_view(g, policy, a), sample_view(g, policy, b));
  AugmentationPolicy mask_only{{AugmentationKind::kAttributeMask}, 0.0};
  Rng c(12);
  EXPECT_EQ(sample_view(g, mask_only, c), g);
  AugmentationPolicy none{{}, 0.2};
  EXPECT_THROW(none.validate(), ConfigError);
  AugmentationPolicy full{{AugmentationKind::kNodeDrop}, 1.0};
  EXPECT_THROW(full.validate(), ConfigError);
}

TEST(Augment, NamesRoundTrip) {
  for (auto k : {AugmentationKind::kNodeDrop, AugmentationKind::kEdgePerturb, AugmentationKind::kAttributeMask,
                 AugmentationKind::kSubgraph})
    EXPECT_EQ(parse_augmentation(augmentation_name(k)), k);
  EXPECT_THROW(parse_augmentation("rotate"), ConfigError);
}

}  // namespace
}  // namespace groupcl

namespace groupcl {
namespace {

TEST(Augment, SampleViewPassesThroughGraphsOutsidePreconditions) {
  const Graph single(1, Matrix(1, 2, 1.0), {});
  const Graph edgeless(3, Matrix(3, 2, 1.0), {});
  Rng rng(13);
  EXPECT_EQ(sample_view(single, {{AugmentationKind::kSubgraph}, 0.5}, rng), single);
  EXPECT_EQ(sample_view(edgeless, {{AugmentationKind::kEdgePerturb}, 0.5}, rng), edgeless);
  EXPECT_THROW(edge_perturb(edgeless, 0.5, rng), ContractError);
  EXPECT_THROW(subgraph_sample(single, 0.5, rng), ContractError);
}

TEST(Augment, SubgraphKeepsRandomGraphsConnected) {
  Rng data(14);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 40; ++trial) {
    const Graph g = testing::random_graph(8, 1, 0.35, data);
    if (!connected(g)) continue;
    ++checked;
    Rng rng(trial);
    EXPECT_TRUE(connected(subgraph_sample(g, 0.4, rng)));
  }
  EXPECT_GE(checked, 10);
}

TEST(Augment, EdgePerturbPreservesCountWhenNonEdgesSuffice) {
  Rng data(15);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = testing::random_graph(9, 1, 0.3, data);
    if (g.edges().empty()) continue;
    const std::size_t m = static_cast<std::size_t>(0.3 * static_cast<double>(g.edges().size()));
    const std::size_t non_edges = 36 - g.edges().size();
    if (non_edges < m) continue;
    Rng rng(trial);
    EXPECT_EQ(edge_perturb(g, 0.3, rng).edges().size(), g.edges().size());
  }
}

}  // namespace
}  // namespace groupcl
