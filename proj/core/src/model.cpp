// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/model.hpp"

#include "groupcl/error.hpp"

namespace groupcl {

namespace {

bool same_adam(const AdamState& a, const AdamState& b) {
  return a.step == b.step && a.first_moment == b.first_moment && a.second_moment == b.second_moment &&
         a.options.learning_rate == b.options.learning_rate && a.options.beta1 == b.options.beta1 &&
         a.options.beta2 == b.options.beta2 && a.options.epsilon == b.options.epsilon;
}

}  // namespace

bool operator==(const ModelState& a, const ModelState& b) {
  return a.config == b.config && a.feature_dim == b.feature_dim && a.params == b.params && a.varnet == b.varnet &&
         same_adam(a.encoder_opt, b.encoder_opt) && same_adam(a.varnet_opt, b.varnet_opt) && a.epoch == b.epoch;
}

GinShape gin_shape(const RunConfig& c, std::size_t feature_dim) {
  GinShape s;
  s.input_dim = feature_dim;
  s.hidden = c.gin_hidden;
  s.layers = c.gin_layers;
  s.output_dim = c.representor_input();
  s.learn_eps = c.learn_eps;
  return s;
}

RepresentorShape representor_shape(const RunConfig& c) {
  RepresentorShape s;
  s.input_dim = c.representor_input();
  s.key_dim = c.d_k;
  s.groups = c.p;
  s.output_dim = c.d_o;
  return s;
}

std::string aux_prefix(const RunConfig& c) {
  return c.tie_views || c.pipeline == Pipeline::kGroupIG ? "u." : "r.";
}

ModelState init_model(const RunConfig& config, std::size_t feature_dim) {
  config.validate();
  if (feature_dim == 0) throw ContractError("init_model: feature width must be positive");
  ModelState st;
  st.config = config;
  st.feature_dim = feature_dim;
  Rng rng = Rng::derive(config.seed, "init");

  std::vector<std::string> branches = {"u."};
  if (aux_prefix(config) != "u.") branches.push_back(aux_prefix(config));
  for (const auto& prefix : branches) {
    init_gin(st.params, prefix, gin_shape(config, feature_dim), rng);
    if (config.pipeline == Pipeline::kGraphCLBaseline) {
      init_projection_head(st.params, prefix, config.representor_input(), config.d_o, rng);
    } else {
      init_representor(st.params, prefix, representor_shape(config), rng);
    }
  }
  if (config.pipeline == Pipeline::kGroupIG && config.node_projection == NodeProjection::kLinear) {
    st.params["u.nodeproj.w"] = glorot_uniform(config.representor_input(), config.value_dim(), rng);
  }
  const bool uses_varnet = config.estimator == Estimator::kParam && config.pipeline != Pipeline::kGraphCLBaseline;
  if (uses_varnet) init_varnet(st.varnet, config.value_dim(), rng);

  AdamOptions opts;
  opts.learning_rate = config.lr;
  st.encoder_opt = make_adam_state(st.params, opts);
  st.varnet_opt = make_adam_state(st.varnet, opts);
  return st;
}

Tensor branch_nodes(ParamBinder& bind, const RunConfig& config, const Batch& batch, const std::string& prefix) {
  const Tensor x = bind.tape().constant(batch.features);
  const GinShape shape = gin_shape(config, batch.features.cols());
  return encode_nodes(x, batch, bind_gin(bind, prefix, shape));
}

GroupEmbeddings branch_groups(ParamBinder& bind, const RunConfig& config, const Batch& batch, const Tensor& nodes,
                              const std::string& prefix) {
  if (config.pipeline == Pipeline::kGraphCLBaseline) {
    const Tensor z = row_l2_normalize(readout_projection(nodes, batch, bind_projection_head(bind, prefix)));
    return GroupEmbeddings::from_rows(z, batch.num_graphs(), 1);
  }
  return represent(nodes, batch.segments, bind_representor(bind, prefix), config.scale_scores);
}

}  // namespace groupcl
