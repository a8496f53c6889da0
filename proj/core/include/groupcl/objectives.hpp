// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Loss terms of the group contrastive objective.
//
// Intra-space: Jensen-Shannon MI estimate between same-group embeddings of
// the two views, negatives drawn from every other graph in the batch.
// Inter-space: CLUB upper bound on MI between different groups of one view,
// either the non-parameterized dot-product form or the variational form.

#pragma once

#include <span>
#include <string>

#include "groupcl/graph.hpp"
#include "groupcl/params.hpp"
#include "groupcl/representor.hpp"

namespace groupcl {

/// Dot product score of two representations.
double discriminator(std::span<const double> u, std::span<const double> r);

struct JsTerms {
  Tensor positive;  // mean over groups and graphs of SP(-D(u_i, r_i))
  Tensor negative;  // mean over groups and ordered pairs i != j of SP(D(u_i, r_j))
  Tensor total() const { return add(positive, negative); }
};

/// Requires at least two graphs and matching shapes.
JsTerms js_mi_terms(const GroupEmbeddings& u, const GroupEmbeddings& r);
Tensor js_mi_loss(const GroupEmbeddings& u, const GroupEmbeddings& r);

/// Node-level pairing: every group embedding of graph s against every row of
/// the duplicated node view (block k of `node_views` pairs with group k).
/// Positive when the node belongs to s, negative otherwise.
JsTerms js_mi_terms_nodes(const GroupEmbeddings& u, const Tensor& node_views, const SegmentBounds& segments);

/// Mean over graphs and unordered group pairs k < l of SP(D(u^k, u^l)).
/// With p < 2 returns 0 and sets *no_pairs.
Tensor interspace_penalty_nonparam(const GroupEmbeddings& u, bool* no_pairs = nullptr);

/// Variational mean / log-variance networks, each relu-MLP d_V -> d_V -> d_V.
struct VarNet {
  Tensor mu_w1, mu_b1, mu_w2, mu_b2;
  Tensor lv_w1, lv_b1, lv_w2, lv_b2;
};

void init_varnet(ParameterMap& params, std::size_t dim, Rng& rng);
VarNet bind_varnet(ParamBinder& bind);

/// Mean over graphs and ordered pairs k != l of
///   sum_i ( -lv_i - (u^l_i - mu_i)^2 / exp(lv_i) ),  mu, lv from u^k.
/// The networks are detached: gradients reach the embeddings only.
Tensor club_param_penalty(const GroupEmbeddings& u, const VarNet& net);
/// Negative of the same expression with the embeddings detached, so
/// gradients reach the networks only.
Tensor varnet_likelihood_loss(const GroupEmbeddings& u, const VarNet& net);

struct LossBreakdown {
  double intra_positive = 0.0;
  double intra_negative = 0.0;
  double inter_penalty = 0.0;
  double total = 0.0;
  double lambda = 0.0;
};

struct LossTerms {
  Tensor intra_positive;
  Tensor intra_negative;
  Tensor inter;
  Tensor total;
  double lambda = 0.0;
  bool inter_degenerate = false;

  LossBreakdown breakdown() const;
};

/// intra + lambda * non-parameterized inter-space penalty.
LossTerms total_loss_nonparam(const GroupEmbeddings& u, const GroupEmbeddings& r, double lambda);
/// intra + lambda * club_param_penalty.
LossTerms total_loss_param(const GroupEmbeddings& u, const GroupEmbeddings& r, double lambda, const VarNet& net);
/// Combines precomputed intra terms with an inter term.
LossTerms combine_losses(const JsTerms& intra, const Tensor& inter, double lambda, bool inter_degenerate = false);

}  // namespace groupcl
