// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Post-training evaluation: frozen embedding extraction, a linear probe,
// query diversity, attention export, and head parameter counts.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "groupcl/graph.hpp"
#include "groupcl/model.hpp"

namespace groupcl {

struct EmbeddingTable {
  std::vector<std::size_t> ids;
  Matrix embeddings;  // one row per graph, width d_o
  std::vector<std::optional<int>> labels;

  std::size_t size() const { return ids.size(); }
};

/// Main-branch embeddings of unaugmented graphs: the p groups concatenated
/// (baseline: the projection output).
EmbeddingTable extract_embeddings(const ModelState& model, const Dataset& dataset, std::size_t chunk = 256);

struct ProbeOptions {
  std::size_t iterations = 300;
  double learning_rate = 0.01;
  /// SVM-style C grid; the L2 weight is 1 / (C * n_train).
  std::vector<double> c_grid = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
  SplitFractions fractions;
};

struct SplitScore {
  double accuracy = 0.0;
  /// confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<double> per_class_accuracy;
  std::size_t size = 0;
};

struct ProbeResult {
  SplitScore train;
  SplitScore validation;
  SplitScore test;
  double selected_c = 0.0;
  std::vector<std::pair<double, double>> validation_sweep;  // (C, accuracy)
  int num_classes = 0;
};

/// Multinomial logistic regression on standardized frozen embeddings,
/// full-batch Adam, C chosen by validation accuracy (first best wins).
ProbeResult linear_probe(const EmbeddingTable& table, std::uint64_t split_seed, const ProbeOptions& options = {});

/// Cosine similarity between query columns; diagonal exactly 1.
Matrix query_cosine_matrix(const Matrix& queries);
Matrix query_cosine_matrix(const ModelState& model);
/// Mean |entry| over the off-diagonal of a square matrix (0 when 1×1).
double mean_offdiagonal_abs(const Matrix& m);

struct AttentionRecord {
  std::size_t node = 0;
  std::size_t group = 0;
  double weight = 0.0;
};

struct AttentionExport {
  Matrix weights;                    // N × p
  std::vector<AttentionRecord> records;
  std::vector<std::size_t> argmax_node;  // per group
};

AttentionExport export_attention(const ModelState& model, const Graph& graph);

struct HeadParamCounts {
  std::uint64_t groupcl_head = 0;
  std::uint64_t graphcl_head = 0;
};

/// Bias-free counts: p*d_K + d_n*d_K + d_n*(d_o/p) for the representor,
/// 2*d_o*d_o for the two-layer projection head.
HeadParamCounts count_head_params(std::uint64_t p, std::uint64_t d_n, std::uint64_t d_k, std::uint64_t d_o);

void write_embeddings_csv(const EmbeddingTable& table, std::ostream& out);
void write_matrix_csv(const Matrix& m, std::ostream& out);
void write_attention_csv(std::size_t graph_id, const AttentionExport& attn, std::ostream& out, bool header = true);
void write_probe_text(const ProbeResult& result, std::ostream& out);
void write_probe_csv(const ProbeResult& result, std::ostream& out);

}  // namespace groupcl
