// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/gin.hpp"

#include "groupcl/error.hpp"

namespace groupcl {

namespace {

std::string layer_name(const std::string& prefix, std::size_t l, const char* leaf) {
  return prefix + "gin." + std::to_string(l) + "." + leaf;
}

}  // namespace

std::size_t GinShape::output_width() const {
  if (output_dim != 0) return output_dim;
  return layers == 0 ? input_dim : hidden;
}

void init_gin(ParameterMap& params, const std::string& prefix, const GinShape& shape, Rng& rng) {
  std::size_t in = shape.input_dim;
  for (std::size_t l = 0; l < shape.layers; ++l) {
    params[layer_name(prefix, l, "w1")] = glorot_uniform(in, shape.hidden, rng);
    params[layer_name(prefix, l, "b1")] = Matrix(1, shape.hidden);
    params[layer_name(prefix, l, "w2")] = glorot_uniform(shape.hidden, shape.hidden, rng);
    params[layer_name(prefix, l, "b2")] = Matrix(1, shape.hidden);
    if (shape.learn_eps) params[layer_name(prefix, l, "eps")] = Matrix(1, 1);
    in = shape.hidden;
  }
  if (shape.output_width() != in) params[prefix + "gin.lift"] = glorot_uniform(in, shape.output_width(), rng);
}

GinEncoder bind_gin(ParamBinder& bind, const std::string& prefix, const GinShape& shape) {
  GinEncoder enc;
  for (std::size_t l = 0; l < shape.layers; ++l) {
    GinLayer layer{bind(layer_name(prefix, l, "w1")), bind(layer_name(prefix, l, "b1")),
                   bind(layer_name(prefix, l, "w2")), bind(layer_name(prefix, l, "b2")),
                   shape.learn_eps ? bind(layer_name(prefix, l, "eps")) : bind.tape().constant(Matrix(1, 1))};
    enc.layers.push_back(layer);
  }
  if (bind.contains(prefix + "gin.lift")) enc.lift = bind(prefix + "gin.lift");
  return enc;
}

Tensor gin_layer(const Tensor& h, const Batch& batch, const GinLayer& layer) {
  if (h.rows() != batch.total_nodes()) {
    throw DimensionError("gin_layer: " + std::to_string(h.rows()) + " rows for a batch of " +
                         std::to_string(batch.total_nodes()) + " nodes");
  }
  if (h.cols() != layer.w1.rows()) {
    throw DimensionError("gin_layer: input width " + std::to_string(h.cols()) + " but layer expects " +
                         std::to_string(layer.w1.rows()));
  }
  const Tensor self = add(h, mul(h, layer.eps));
  const Tensor agg = add(self, neighbor_sum(h, batch.adjacency));
  const Tensor hidden = relu(add(matmul(agg, layer.w1), layer.b1));
  return add(matmul(hidden, layer.w2), layer.b2);
}

Tensor encode_nodes(const Tensor& x, const Batch& batch, const GinEncoder& encoder) {
  Tensor h = x;
  for (const GinLayer& layer : encoder.layers) h = gin_layer(h, batch, layer);
  if (encoder.lift) h = matmul(h, *encoder.lift);
  return h;
}

void init_projection_head(ParameterMap& params, const std::string& prefix, std::size_t input_dim, std::size_t width,
                          Rng& rng) {
  params[prefix + "head.w1"] = glorot_uniform(input_dim, width, rng);
  params[prefix + "head.w2"] = glorot_uniform(width, width, rng);
}

ProjectionHead bind_projection_head(ParamBinder& bind, const std::string& prefix) {
  return {bind(prefix + "head.w1"), bind(prefix + "head.w2")};
}

Tensor readout_projection(const Tensor& nodes, const Batch& batch, const ProjectionHead& head) {
  if (nodes.cols() != head.w1.rows()) {
    throw DimensionError("readout_projection: node width " + std::to_string(nodes.cols()) + " but head expects " +
                         std::to_string(head.w1.rows()));
  }
  const Tensor pooled = segment_sum(nodes, batch.segments);
  return matmul(relu(matmul(pooled, head.w1)), head.w2);
}

}  // namespace groupcl
