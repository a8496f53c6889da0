// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "groupcl/tensor.hpp"

namespace groupcl {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected graph with per-node features. The constructor validates the
/// invariants (row count = node count, endpoints in range, no self-loops, no
/// duplicate edges); self-connections are added inside aggregation instead.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t num_nodes, Matrix features, std::vector<Edge> edges, std::optional<int> label = std::nullopt);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t feature_dim() const noexcept { return features_.cols(); }
  const Matrix& features() const noexcept { return features_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::optional<int>& label() const noexcept { return label_; }

  /// Neighbor lists (both directions), node order preserved.
  std::vector<std::vector<std::size_t>> neighbor_lists() const;
  bool has_edge(std::size_t u, std::size_t v) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t num_nodes_ = 0;
  Matrix features_;
  std::vector<Edge> edges_;
  std::optional<int> label_;
};

struct Dataset {
  std::vector<Graph> graphs;
  std::size_t feature_dim = 0;
  int num_classes = 0;

  std::size_t size() const noexcept { return graphs.size(); }
  bool empty() const noexcept { return graphs.empty(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Builds a Dataset from graphs, checking shared width and deriving
/// num_classes as max label + 1.
Dataset make_dataset(std::vector<Graph> graphs);

/// Disjoint union of graphs in order, with per-graph node segments.
struct Batch {
  Matrix features;                 // total_nodes × d
  std::vector<Edge> edges;         // offset-shifted
  SegmentBounds segments;          // size num_graphs + 1
  std::vector<std::optional<int>> labels;
  Adjacency adjacency;

  std::size_t num_graphs() const noexcept { return segments.empty() ? 0 : segments.size() - 1; }
  std::size_t total_nodes() const noexcept { return features.rows(); }
  /// Graph index owning each node.
  std::vector<std::size_t> node_owner() const;
};

Batch batch_graphs(const std::vector<Graph>& graphs);
/// Inverse of batch_graphs.
std::vector<Graph> unbatch(const Batch& batch);

// Line-delimited dataset file: one JSON object per line,
//   {"n": 3, "x": [row-major features], "e": [u0, v0, u1, v1, ...], "y": 0}
// "y" is optional. Unknown fields are rejected.

Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::istream& in);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
void write_dataset(const Dataset& dataset, std::ostream& out);

struct MotifDatasetOptions {
  std::uint64_t seed = 7;
  std::size_t num_graphs = 200;
  std::size_t nodes_per_graph = 14;
  std::size_t feature_dim = 8;
};

inline constexpr double kBackgroundEdgeDensity = 0.15;
inline constexpr double kFeatureNoiseStddev = 0.01;

/// Two balanced classes of random background graphs: class 0 carries a
/// planted 4-clique, class 1 a planted 6-cycle. Features are a one-hot
/// degree bucket (capped at feature_dim-1) plus small Gaussian noise.
Dataset generate_planted_motif_dataset(const MotifDatasetOptions& options);

struct SplitFractions {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of [0, n) then a contiguous split. Sizes are
/// round(train*n), round(validation*n) and the remainder.
DatasetSplit split_indices(std::size_t n, const SplitFractions& fractions, std::uint64_t seed);

struct SplitDatasets {
  Dataset train;
  Dataset validation;
  Dataset test;
};

SplitDatasets split_dataset(const Dataset& dataset, const SplitFractions& fractions, std::uint64_t seed);

/// Count of graphs per class label (unlabelled graphs are skipped).
std::vector<std::size_t> class_counts(const Dataset& dataset);

}  // namespace groupcl
