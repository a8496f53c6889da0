// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/representor.hpp"

#include <cmath>

#include "groupcl/error.hpp"

namespace groupcl {

std::size_t RepresentorShape::value_dim() const {
  if (groups == 0 || output_dim % groups != 0) {
    throw ConfigError("d_o=" + std::to_string(output_dim) + " is not divisible by p=" + std::to_string(groups));
  }
  return output_dim / groups;
}

void init_representor(ParameterMap& params, const std::string& prefix, const RepresentorShape& shape, Rng& rng) {
  params[prefix + "rep.wk"] = glorot_uniform(shape.input_dim, shape.key_dim, rng);
  params[prefix + "rep.wv"] = glorot_uniform(shape.input_dim, shape.value_dim(), rng);
  params[prefix + "rep.q"] = standard_normal(shape.key_dim, shape.groups, rng, 1.0 / std::sqrt(double(shape.key_dim)));
}

RepresentorParams bind_representor(ParamBinder& bind, const std::string& prefix) {
  return {bind(prefix + "rep.wk"), bind(prefix + "rep.wv"), bind(prefix + "rep.q")};
}

GroupEmbeddings GroupEmbeddings::from_rows(const Tensor& rows, std::size_t num_graphs, std::size_t p) {
  if (p == 0 || rows.rows() != num_graphs * p) {
    throw DimensionError("group embeddings: " + std::to_string(rows.rows()) + " rows for " + std::to_string(num_graphs) +
                         " graphs x " + std::to_string(p) + " groups");
  }
  return GroupEmbeddings{rows, Tensor{}, num_graphs, p};
}

std::pair<Tensor, Tensor> project_kv(const Tensor& nodes, const RepresentorParams& params) {
  if (nodes.cols() != params.w_k.rows() || nodes.cols() != params.w_v.rows()) {
    throw DimensionError("project_kv: node width " + std::to_string(nodes.cols()) + " but projections expect " +
                         std::to_string(params.w_k.rows()));
  }
  return {matmul(nodes, params.w_k), matmul(nodes, params.w_v)};
}

Tensor attention(const Tensor& keys, const Tensor& queries, const SegmentBounds& segments, bool scale_scores) {
  if (keys.cols() != queries.rows()) {
    throw DimensionError("attention: key width " + std::to_string(keys.cols()) + " but queries have " +
                         std::to_string(queries.rows()) + " rows");
  }
  Tensor scores = matmul(keys, queries);
  if (scale_scores) scores = scale(scores, 1.0 / std::sqrt(static_cast<double>(keys.cols())));
  return segment_softmax(scores, segments);
}

GroupEmbeddings group_embed(const Tensor& values, const Tensor& attn, const SegmentBounds& segments) {
  const Tensor pooled = segment_weighted_sum(attn, values, segments);
  return GroupEmbeddings{row_l2_normalize(pooled), attn, segments.size() - 1, attn.cols()};
}

GroupEmbeddings represent(const Tensor& nodes, const SegmentBounds& segments, const RepresentorParams& params,
                          bool scale_scores) {
  const auto [keys, values] = project_kv(nodes, params);
  return group_embed(values, attention(keys, params.q, segments, scale_scores), segments);
}

Tensor concat_groups(const GroupEmbeddings& ge) { return reshape(ge.groups, ge.num_graphs, ge.p * ge.dim()); }

std::vector<Matrix> duplicate_rep(const Matrix& r, std::size_t p) {
  if (p == 0) throw ContractError("duplicate_rep: p must be at least 1");
  return std::vector<Matrix>(p, r);
}

Tensor duplicate_rows(const Tensor& r, std::size_t p) {
  if (p == 0) throw ContractError("duplicate_rows: p must be at least 1");
  std::vector<std::size_t> idx;
  idx.reserve(p * r.rows());
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t i = 0; i < r.rows(); ++i) idx.push_back(i);
  return select_rows(r, idx);
}

}  // namespace groupcl
