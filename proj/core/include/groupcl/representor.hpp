// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Attention representor: p learned queries attend over a graph's node keys
// and pool its values into p group embeddings.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "groupcl/graph.hpp"
#include "groupcl/params.hpp"

namespace groupcl {

struct RepresentorParams {
  Tensor w_k;  // d_n × d_K
  Tensor w_v;  // d_n × d_V
  Tensor q;    // d_K × p
};

struct RepresentorShape {
  std::size_t input_dim = 160;  // d_n
  std::size_t key_dim = 100;    // d_K
  std::size_t groups = 4;       // p
  std::size_t output_dim = 160; // d_o

  /// d_V = d_o / p; throws ConfigError unless the division is exact.
  std::size_t value_dim() const;
};

void init_representor(ParameterMap& params, const std::string& prefix, const RepresentorShape& shape, Rng& rng);
RepresentorParams bind_representor(ParamBinder& bind, const std::string& prefix);

/// Group embeddings for a batch. Row s*p + k of `groups` holds group k of
/// graph s (unit L2 norm). `attention` is the N×p weight matrix it came from.
struct GroupEmbeddings {
  Tensor groups;
  Tensor attention;
  std::size_t num_graphs = 0;
  std::size_t p = 0;

  std::size_t dim() const { return groups.cols(); }
  /// Wraps an existing (B*p)×d matrix, e.g. in tests.
  static GroupEmbeddings from_rows(const Tensor& rows, std::size_t num_graphs, std::size_t p);
};

std::pair<Tensor, Tensor> project_kv(const Tensor& nodes, const RepresentorParams& params);
/// Softmax(K Q) normalized down the nodes of each graph, per query. With
/// `scale_scores` the scores are divided by sqrt(d_K) first.
Tensor attention(const Tensor& keys, const Tensor& queries, const SegmentBounds& segments, bool scale_scores = false);
/// Attention-weighted sums of the value rows per graph and query, then
/// unit-normalized.
GroupEmbeddings group_embed(const Tensor& values, const Tensor& attention, const SegmentBounds& segments);
/// The full representor: project, attend, pool.
GroupEmbeddings represent(const Tensor& nodes, const SegmentBounds& segments, const RepresentorParams& params,
                          bool scale_scores = false);

/// B × (p*d_V): group vectors of each graph laid side by side in group order.
Tensor concat_groups(const GroupEmbeddings& ge);

/// p independent copies of `r`.
std::vector<Matrix> duplicate_rep(const Matrix& r, std::size_t p);
/// Tape version: stacks p copies of all rows of `r` (block k = copy k).
Tensor duplicate_rows(const Tensor& r, std::size_t p);

}  // namespace groupcl
