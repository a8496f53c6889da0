// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "groupcl/graph.hpp"
#include "groupcl/model.hpp"

namespace groupcl {

struct HistoryRow {
  std::uint64_t epoch = 0;
  std::uint64_t step = 0;  // encoder optimizer step after the update
  LossBreakdown loss;
};

using History = std::vector<HistoryRow>;

struct TrainResult {
  ModelState state;
  History history;
  std::vector<std::string> warnings;
};

/// Called after every completed epoch (e.g. for progress or checkpoints).
using EpochCallback = std::function<void(const ModelState&, const History&)>;

/// Two augmented views per graph through a shared (or untied) encoder and
/// representor, group contrastive loss, one Adam step per batch. With the
/// param estimator the variational networks take their own step(s) first.
TrainResult train_groupcl(const RunConfig& config, const Dataset& dataset);
/// Unaugmented graphs; group embeddings contrasted against node embeddings
/// duplicated once per group.
TrainResult train_groupig(const RunConfig& config, const Dataset& dataset);
/// Sum readout + projection head in place of the representor; no inter term.
TrainResult train_baseline_graphcl(const RunConfig& config, const Dataset& dataset);
/// Dispatches on config.pipeline.
TrainResult train(const RunConfig& config, const Dataset& dataset);

/// Continues `state` from state.epoch up to `until_epoch` (default: the
/// configured epoch count). Trajectories match an uninterrupted run.
TrainResult continue_training(ModelState state, const Dataset& dataset, std::optional<std::uint64_t> until_epoch = {},
                              const EpochCallback& on_epoch = {});

/// Per-batch graph indices of one epoch (seeded shuffle, contiguous chunks).
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t num_graphs, std::size_t batch_size, std::uint64_t seed,
                                                    std::uint64_t epoch);

/// View-r representations for GroupIG: node embeddings L2-normalized,
/// mapped to d_V, then duplicated once per group (block k = group k).
Tensor groupig_node_views(ParamBinder& bind, const RunConfig& config, const Tensor& nodes);

/// Mean total loss per epoch, in epoch order.
std::vector<double> epoch_mean_totals(const History& history);

void write_history_csv(const History& history, std::ostream& out);

}  // namespace groupcl
