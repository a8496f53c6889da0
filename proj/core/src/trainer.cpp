// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/trainer.hpp"

#include <map>
#include <ostream>

#include "groupcl/augment.hpp"
#include "groupcl/error.hpp"

namespace groupcl {

namespace {

// Inter-space term for the grouping pipelines, running the variational
// networks' own update first when the parameterized estimator is active.
LossTerms group_losses(ModelState& st, const GroupEmbeddings& u, const JsTerms& intra) {
  const RunConfig& c = st.config;
  Tape& tape = u.groups.tape();
  if (c.estimator == Estimator::kParam) {
    for (std::size_t i = 0; i < c.varnet_steps; ++i) {
      ParamBinder vbind(tape, st.varnet, true);
      const Tensor vloss = varnet_likelihood_loss(u, bind_varnet(vbind));
      adam_step(st.varnet, vbind.gradients(tape.backward(vloss)), st.varnet_opt);
    }
    ParamBinder frozen(tape, st.varnet, false);
    return combine_losses(intra, club_param_penalty(u, bind_varnet(frozen)), c.lambda);
  }
  bool degenerate = false;
  const Tensor inter = interspace_penalty_nonparam(u, &degenerate);
  return combine_losses(intra, inter, c.lambda, degenerate);
}

void encoder_update(ModelState& st, ParamBinder& bind, const LossTerms& terms, History& history) {
  adam_step(st.params, bind.gradients(bind.tape().backward(terms.total)), st.encoder_opt);
  history.push_back({st.epoch, st.encoder_opt.step, terms.breakdown()});
}

void contrastive_step(ModelState& st, const Dataset& ds, const std::vector<std::size_t>& idx, History& history) {
  const RunConfig& c = st.config;
  std::vector<Graph> views_u, views_r;
  for (std::size_t i : idx) {
    Rng ru = Rng::derive(c.seed, "augment", {st.epoch, i, 0});
    Rng rr = Rng::derive(c.seed, "augment", {st.epoch, i, 1});
    views_u.push_back(sample_view(ds.graphs[i], c.augmentation, ru));
    views_r.push_back(sample_view(ds.graphs[i], c.augmentation, rr));
  }
  const Batch bu = batch_graphs(views_u);
  const Batch br = batch_graphs(views_r);

  Tape tape;
  ParamBinder bind(tape, st.params, true);
  const std::string aux = aux_prefix(c);
  const GroupEmbeddings u = branch_groups(bind, c, bu, branch_nodes(bind, c, bu, "u."), "u.");
  const GroupEmbeddings r = branch_groups(bind, c, br, branch_nodes(bind, c, br, aux), aux);
  const JsTerms intra = js_mi_terms(u, r);

  LossTerms terms;
  if (c.pipeline == Pipeline::kGraphCLBaseline) {
    terms = combine_losses(intra, tape.constant(Matrix(1, 1)), c.lambda, true);
  } else {
    terms = group_losses(st, u, intra);
  }
  encoder_update(st, bind, terms, history);
}

void infograph_step(ModelState& st, const Dataset& ds, const std::vector<std::size_t>& idx, History& history) {
  const RunConfig& c = st.config;
  std::vector<Graph> graphs;
  for (std::size_t i : idx) graphs.push_back(ds.graphs[i]);
  const Batch batch = batch_graphs(graphs);

  Tape tape;
  ParamBinder bind(tape, st.params, true);
  const Tensor nodes = branch_nodes(bind, c, batch, "u.");
  const GroupEmbeddings u = branch_groups(bind, c, batch, nodes, "u.");
  const Tensor node_views = groupig_node_views(bind, c, nodes);
  const JsTerms intra = js_mi_terms_nodes(u, node_views, batch.segments);
  encoder_update(st, bind, group_losses(st, u, intra), history);
}

void check_dataset(const ModelState& st, const Dataset& ds) {
  if (ds.empty()) throw ContractError("train: dataset is empty");
  if (ds.feature_dim != st.feature_dim) {
    throw DimensionError("train: dataset feature width " + std::to_string(ds.feature_dim) + " but model expects " +
                         std::to_string(st.feature_dim));
  }
}

TrainResult run(const RunConfig& config, const Dataset& dataset, Pipeline expected) {
  if (config.pipeline != expected) {
    throw ConfigError("pipeline is '" + std::string(pipeline_name(config.pipeline)) + "', expected '" +
                      std::string(pipeline_name(expected)) + "'");
  }
  if (dataset.empty()) throw ContractError("train: dataset is empty");
  return continue_training(init_model(config, dataset.feature_dim), dataset);
}

}  // namespace

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t num_graphs, std::size_t batch_size, std::uint64_t seed,
                                                    std::uint64_t epoch) {
  std::vector<std::size_t> order(num_graphs);
  for (std::size_t i = 0; i < num_graphs; ++i) order[i] = i;
  Rng rng = Rng::derive(seed, "shuffle", {epoch});
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < num_graphs; start += batch_size) {
    const std::size_t end = std::min(num_graphs, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

Tensor groupig_node_views(ParamBinder& bind, const RunConfig& config, const Tensor& nodes) {
  Tensor views = row_l2_normalize(nodes);
  if (config.node_projection == NodeProjection::kLinear) views = matmul(views, bind("u.nodeproj.w"));
  return duplicate_rows(views, config.p);
}

TrainResult continue_training(ModelState state, const Dataset& dataset, std::optional<std::uint64_t> until_epoch,
                              const EpochCallback& on_epoch) {
  check_dataset(state, dataset);
  const RunConfig c = state.config;
  const std::uint64_t stop = until_epoch.value_or(c.epochs);
  TrainResult result;
  while (state.epoch < stop) {
    std::size_t steps = 0;
    for (const auto& idx : epoch_batches(dataset.size(), c.batch_size, c.seed, state.epoch)) {
      if (idx.size() < 2) {
        result.warnings.push_back("epoch " + std::to_string(state.epoch) + ": skipped a batch of " +
                                  std::to_string(idx.size()) + " graph(s); negatives need at least 2");
        continue;
      }
      if (c.pipeline == Pipeline::kGroupIG) infograph_step(state, dataset, idx, result.history);
      else contrastive_step(state, dataset, idx, result.history);
      ++steps;
    }
    if (steps == 0) throw ContractError("train: epoch " + std::to_string(state.epoch) + " has no usable batch");
    ++state.epoch;
    if (on_epoch) on_epoch(state, result.history);
  }
  result.state = std::move(state);
  return result;
}

TrainResult train_groupcl(const RunConfig& config, const Dataset& dataset) {
  return run(config, dataset, Pipeline::kGroupCL);
}

TrainResult train_groupig(const RunConfig& config, const Dataset& dataset) {
  return run(config, dataset, Pipeline::kGroupIG);
}

TrainResult train_baseline_graphcl(const RunConfig& config, const Dataset& dataset) {
  return run(config, dataset, Pipeline::kGraphCLBaseline);
}

TrainResult train(const RunConfig& config, const Dataset& dataset) { return run(config, dataset, config.pipeline); }

std::vector<double> epoch_mean_totals(const History& history) {
  std::map<std::uint64_t, std::pair<double, std::size_t>> acc;
  for (const auto& row : history) {
    auto& [s, n] = acc[row.epoch];
    s += row.loss.total;
    ++n;
  }
  std::vector<double> out;
  for (const auto& [epoch, sn] : acc) out.push_back(sn.first / static_cast<double>(sn.second));
  return out;
}

void write_history_csv(const History& history, std::ostream& out) {
  out << "epoch,step,intra_pos,intra_neg,inter,total\n";
  for (const auto& row : history) {
    out << row.epoch << ',' << row.step << ',' << format_double(row.loss.intra_positive) << ','
        << format_double(row.loss.intra_negative) << ',' << format_double(row.loss.inter_penalty) << ','
        << format_double(row.loss.total) << '\n';
  }
}

}  // namespace groupcl
