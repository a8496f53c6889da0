// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/objectives.hpp"

#include <vector>

#include "groupcl/error.hpp"

namespace groupcl {

double discriminator(std::span<const double> u, std::span<const double> r) {
  if (u.size() != r.size()) {
    throw DimensionError("discriminator: dims " + std::to_string(u.size()) + " and " + std::to_string(r.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * r[i];
  return s;
}

namespace {

// sum(mask ⊙ SP(sign * scores)) / count
Tensor masked_softplus_mean(const Tensor& scores, const Matrix& mask, double sign, double count) {
  Tape& tape = scores.tape();
  const Tensor sp = softplus(sign > 0 ? scores : negate(scores));
  return scale(sum(mul(sp, tape.constant(mask))), 1.0 / count);
}

void check_pair(const GroupEmbeddings& u, const GroupEmbeddings& r) {
  if (u.num_graphs != r.num_graphs || u.p != r.p || u.dim() != r.dim()) {
    throw DimensionError("js_mi_loss: views differ in batch size, groups or width");
  }
}

// Rows of u ordered group-major: all graphs of group 0, then group 1, ...
std::vector<std::size_t> group_rows(std::size_t num_graphs, std::size_t p, std::size_t k) {
  std::vector<std::size_t> idx(num_graphs);
  for (std::size_t s = 0; s < num_graphs; ++s) idx[s] = s * p + k;
  return idx;
}

}  // namespace

JsTerms js_mi_terms(const GroupEmbeddings& u, const GroupEmbeddings& r) {
  check_pair(u, r);
  const std::size_t b = u.num_graphs, p = u.p, n = b * p;
  if (b < 2) throw ContractError("js_mi_loss: need at least 2 graphs for negatives, got " + std::to_string(b));
  const Tensor scores = matmul(u.groups, transpose(r.groups));
  Matrix pos(n, n), neg(n, n);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < b; ++j)
      for (std::size_t k = 0; k < p; ++k) (i == j ? pos : neg)(i * p + k, j * p + k) = 1.0;
  const double bp = static_cast<double>(b * p);
  return {masked_softplus_mean(scores, pos, -1.0, bp),
          masked_softplus_mean(scores, neg, +1.0, bp * static_cast<double>(b - 1))};
}

Tensor js_mi_loss(const GroupEmbeddings& u, const GroupEmbeddings& r) { return js_mi_terms(u, r).total(); }

JsTerms js_mi_terms_nodes(const GroupEmbeddings& u, const Tensor& node_views, const SegmentBounds& segments) {
  const std::size_t b = u.num_graphs, p = u.p;
  if (b < 2) throw ContractError("js_mi_loss: need at least 2 graphs for negatives, got " + std::to_string(b));
  if (segments.size() != b + 1) throw DimensionError("js_mi_terms_nodes: segment count differs from batch size");
  const std::size_t n = segments.back();
  if (node_views.rows() != p * n || node_views.cols() != u.dim()) {
    throw DimensionError("js_mi_terms_nodes: node views " + node_views.value().shape_string() + " for " +
                         std::to_string(p) + " groups of " + std::to_string(n) + " nodes, width " +
                         std::to_string(u.dim()));
  }
  Matrix pos(b, n), neg(b, n);
  double npos = 0.0;
  for (std::size_t s = 0; s < b; ++s)
    for (std::size_t v = 0; v < n; ++v) {
      const bool own = v >= segments[s] && v < segments[s + 1];
      (own ? pos : neg)(s, v) = 1.0;
      npos += own ? 1.0 : 0.0;
    }
  const double nneg = static_cast<double>(b * n) - npos;
  const double groups = static_cast<double>(p);
  Tensor pos_sum, neg_sum;
  for (std::size_t k = 0; k < p; ++k) {
    const auto urows = group_rows(b, p, k);
    std::vector<std::size_t> vrows(n);
    for (std::size_t v = 0; v < n; ++v) vrows[v] = k * n + v;
    const Tensor scores = matmul(select_rows(u.groups, urows), transpose(select_rows(node_views, vrows)));
    const Tensor pk = masked_softplus_mean(scores, pos, -1.0, npos * groups);
    const Tensor nk = masked_softplus_mean(scores, neg, +1.0, nneg * groups);
    pos_sum = k == 0 ? pk : add(pos_sum, pk);
    neg_sum = k == 0 ? nk : add(neg_sum, nk);
  }
  return {pos_sum, neg_sum};
}

Tensor interspace_penalty_nonparam(const GroupEmbeddings& u, bool* no_pairs) {
  const std::size_t b = u.num_graphs, p = u.p, n = b * p;
  if (no_pairs) *no_pairs = p < 2;
  if (p < 2) return u.groups.tape().constant(Matrix(1, 1));
  const Tensor scores = matmul(u.groups, transpose(u.groups));
  Matrix mask(n, n);
  for (std::size_t s = 0; s < b; ++s)
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t l = k + 1; l < p; ++l) mask(s * p + k, s * p + l) = 1.0;
  const double pairs = static_cast<double>(b * p * (p - 1) / 2);
  return masked_softplus_mean(scores, mask, +1.0, pairs);
}

void init_varnet(ParameterMap& params, std::size_t dim, Rng& rng) {
  for (const char* net : {"mu", "lv"}) {
    const std::string prefix = std::string("varnet.") + net + ".";
    params[prefix + "w1"] = glorot_uniform(dim, dim, rng);
    params[prefix + "b1"] = Matrix(1, dim);
    params[prefix + "w2"] = glorot_uniform(dim, dim, rng);
    params[prefix + "b2"] = Matrix(1, dim);
  }
}

VarNet bind_varnet(ParamBinder& bind) {
  return {bind("varnet.mu.w1"), bind("varnet.mu.b1"), bind("varnet.mu.w2"), bind("varnet.mu.b2"),
          bind("varnet.lv.w1"), bind("varnet.lv.b1"), bind("varnet.lv.w2"), bind("varnet.lv.b2")};
}

namespace {

Tensor mlp(const Tensor& x, const Tensor& w1, const Tensor& b1, const Tensor& w2, const Tensor& b2) {
  return add(matmul(relu(add(matmul(x, w1), b1)), w2), b2);
}

VarNet detached(const VarNet& n) {
  return {detach(n.mu_w1), detach(n.mu_b1), detach(n.mu_w2), detach(n.mu_b2),
          detach(n.lv_w1), detach(n.lv_b1), detach(n.lv_w2), detach(n.lv_b2)};
}

// Mean over graphs and ordered pairs (k, l), k != l, of the conditional
// log-likelihood kernel sum_i(-lv_i - (u^l_i - mu_i)^2 exp(-lv_i)).
Tensor conditional_log_likelihood(const Tensor& groups, std::size_t b, std::size_t p, const VarNet& net) {
  if (net.mu_w1.rows() != groups.cols()) {
    throw DimensionError("varnet: input width " + std::to_string(net.mu_w1.rows()) + " but embeddings have " +
                         std::to_string(groups.cols()));
  }
  const Tensor mu = mlp(groups, net.mu_w1, net.mu_b1, net.mu_w2, net.mu_b2);
  const Tensor lv = mlp(groups, net.lv_w1, net.lv_b1, net.lv_w2, net.lv_b2);
  std::vector<std::size_t> src, dst;
  for (std::size_t s = 0; s < b; ++s)
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t l = 0; l < p; ++l)
        if (k != l) {
          src.push_back(s * p + k);
          dst.push_back(s * p + l);
        }
  const Tensor mu_k = select_rows(mu, src);
  const Tensor lv_k = select_rows(lv, src);
  const Tensor u_l = select_rows(groups, dst);
  const Tensor residual2 = square(sub(u_l, mu_k));
  const Tensor kernel = sub(negate(lv_k), mul(residual2, exp(negate(lv_k))));
  return scale(sum(kernel), 1.0 / static_cast<double>(src.size()));
}

}  // namespace

Tensor club_param_penalty(const GroupEmbeddings& u, const VarNet& net) {
  if (u.p < 2) throw ContractError("club_param_penalty: need p >= 2");
  return conditional_log_likelihood(u.groups, u.num_graphs, u.p, detached(net));
}

Tensor varnet_likelihood_loss(const GroupEmbeddings& u, const VarNet& net) {
  if (u.p < 2) throw ContractError("varnet_likelihood_loss: need p >= 2");
  return negate(conditional_log_likelihood(detach(u.groups), u.num_graphs, u.p, net));
}

LossBreakdown LossTerms::breakdown() const {
  return {intra_positive.item(), intra_negative.item(), inter.item(), total.item(), lambda};
}

LossTerms combine_losses(const JsTerms& intra, const Tensor& inter, double lambda, bool inter_degenerate) {
  if (!(lambda >= 0.0)) throw ContractError("loss: lambda must be non-negative");
  const Tensor total = add(add(intra.positive, intra.negative), scale(inter, lambda));
  return {intra.positive, intra.negative, inter, total, lambda, inter_degenerate};
}

LossTerms total_loss_nonparam(const GroupEmbeddings& u, const GroupEmbeddings& r, double lambda) {
  bool degenerate = false;
  const Tensor inter = interspace_penalty_nonparam(u, &degenerate);
  return combine_losses(js_mi_terms(u, r), inter, lambda, degenerate);
}

LossTerms total_loss_param(const GroupEmbeddings& u, const GroupEmbeddings& r, double lambda, const VarNet& net) {
  return combine_losses(js_mi_terms(u, r), club_param_penalty(u, net), lambda);
}

}  // namespace groupcl
