// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "groupcl/analysis.hpp"
#include "groupcl/error.hpp"
#include "groupcl/trainer.hpp"
#include "support/small_runs.hpp"
#include "support/test_support.hpp"

namespace groupcl {
namespace {

EmbeddingTable toy_table(std::size_t n, double noise, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingTable t;
  t.embeddings = Matrix(n, 5);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    t.ids.push_back(i);
    t.labels.push_back(label);
    t.embeddings(i, 0) = label == 0 ? 1.0 : -1.0;
    for (std::size_t c = 0; c < 5; ++c) t.embeddings(i, c) += noise * rng.normal();
  }
  return t;
}

TEST(Probe, SeparableToyIsPerfect) {
  const ProbeResult r = linear_probe(toy_table(200, 0.01, 1), 3);
  EXPECT_EQ(r.test.accuracy, 1.0);
  EXPECT_EQ(r.validation.accuracy, 1.0);
  EXPECT_EQ(r.num_classes, 2);
  EXPECT_EQ(r.validation_sweep.size(), 7u);
}

TEST(Probe, ShuffledLabelsStayNearChance) {
  // Permutation null: 3-sigma band for a balanced binomial over the test split.
  EmbeddingTable t = toy_table(400, 1.0, 2);
  Rng rng(5);
  rng.shuffle(t.labels);
  const ProbeResult r = linear_probe(t, 7);
  const double n = static_cast<double>(r.test.size);
  EXPECT_LE(std::abs(r.test.accuracy - 0.5), 3.0 * std::sqrt(0.25 / n));
}

TEST(Probe, ConfusionCountsMatchSplitSizes) {
  const ProbeResult r = linear_probe(toy_table(100, 0.8, 3), 4);
  for (const SplitScore* s : {&r.train, &r.validation, &r.test}) {
    std::size_t total = 0;
    for (const auto& row : s->confusion)
      for (auto c : row) total += c;
    EXPECT_EQ(total, s->size);
    EXPECT_GE(s->accuracy, 0.0);
    EXPECT_LE(s->accuracy, 1.0);
  }
  EXPECT_EQ(r.train.size + r.validation.size + r.test.size, 100u);
}

TEST(Probe, Deterministic) {
  const EmbeddingTable t = toy_table(120, 0.7, 4);
  const ProbeResult a = linear_probe(t, 9), b = linear_probe(t, 9);
  EXPECT_EQ(a.validation_sweep, b.validation_sweep);
  EXPECT_EQ(a.test.accuracy, b.test.accuracy);
}

TEST(Probe, SingleClassTrainSplitIsRejected) {
  EmbeddingTable t = toy_table(50, 0.1, 5);
  for (auto& l : t.labels) l = 0;
  EXPECT_THROW(linear_probe(t, 1), ContractError);
  t.labels[0].reset();
  EXPECT_THROW(linear_probe(t, 1), ContractError);
}

TEST(Extract, WidthAndDeterminism) {
  RunConfig c;
  c.epochs = 0;
  c.gin_hidden = 8;
  const Dataset ds = testing::small_dataset(6);
  const ModelState m = init_model(c, ds.feature_dim);
  const EmbeddingTable a = extract_embeddings(m, ds, 4);
  EXPECT_EQ(a.embeddings.rows(), 6u);
  EXPECT_EQ(a.embeddings.cols(), 160u);
  EXPECT_EQ(a.embeddings, extract_embeddings(m, ds).embeddings);
  EXPECT_EQ(a.labels[1], ds.graphs[1].label());
}

TEST(Extract, IsomorphicGraphsGiveEqualRows) {
  Rng rng(6);
  const Graph g = testing::random_graph(6, 6, 0.5, rng, 0);
  std::vector<std::size_t> perm = {3, 5, 0, 1, 4, 2};
  Matrix px(6, 6);
  for (std::size_t v = 0; v < 6; ++v) std::copy_n(g.features().row_span(v).begin(), 6, px.row_span(perm[v]).begin());
  std::vector<Edge> pe;
  for (auto [u, v] : g.edges()) pe.push_back({perm[u], perm[v]});
  const Dataset ds = make_dataset({g, Graph(6, px, pe, 1)});
  const ModelState m = init_model(testing::small_config(), 6);
  const EmbeddingTable t = extract_embeddings(m, ds);
  for (std::size_t c = 0; c < t.embeddings.cols(); ++c) EXPECT_NEAR(t.embeddings(0, c), t.embeddings(1, c), 1e-10);
}

TEST(Extract, WidthMismatchIsDimensionError) {
  const ModelState m = init_model(testing::small_config(), 5);
  EXPECT_THROW(extract_embeddings(m, testing::small_dataset(4)), DimensionError);
}

TEST(Cosine, IdenticalAndOrthogonalQueries) {
  EXPECT_EQ(query_cosine_matrix(Matrix(3, 4, 0.5)), Matrix(4, 4, 1.0));
  EXPECT_EQ(query_cosine_matrix(Matrix::identity(3)), Matrix::identity(3));
  EXPECT_THROW(query_cosine_matrix(Matrix(3, 2)), NumericError);
}

TEST(Cosine, TrainedModelIsSymmetricWithUnitDiagonal) {
  const ModelState m = train(testing::small_config(), testing::small_dataset()).state;
  const Matrix c = query_cosine_matrix(m);
  ASSERT_EQ(c.rows(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(c(k, k), 1.0);
    for (std::size_t l = 0; l < 4; ++l) EXPECT_EQ(c(k, l), c(l, k));
  }
  EXPECT_EQ(mean_offdiagonal_abs(Matrix::identity(4)), 0.0);
  EXPECT_DOUBLE_EQ(mean_offdiagonal_abs(Matrix(3, 3, -0.5)), 0.5);
}

TEST(Attention, SingleNodeGraphPutsAllWeightOnIt) {
  const ModelState m = init_model(testing::small_config(), 6);
  const AttentionExport a = export_attention(m, Graph(1, Matrix(1, 6, 0.3), {}));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(a.weights(0, k), 1.0);
    EXPECT_EQ(a.argmax_node[k], 0u);
  }
  EXPECT_EQ(a.records.size(), 4u);
}

TEST(Attention, SymmetricGraphIsUniform) {
  const ModelState m = init_model(testing::small_config(), 6);
  const Graph cycle(5, Matrix(5, 6, 1.0), {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  const AttentionExport a = export_attention(m, cycle);
  for (double w : a.weights.data()) EXPECT_NEAR(w, 0.2, 1e-12);
}

TEST(Attention, MatchesForwardPassAttention) {
  const Dataset ds = testing::small_dataset(4);
  const ModelState m = train(testing::small_config(), testing::small_dataset()).state;
  const AttentionExport a = export_attention(m, ds.graphs[2]);
  Tape tape;
  ParamBinder bind(tape, m.params, false);
  const Batch b = batch_graphs({ds.graphs[2]});
  const GroupEmbeddings ge = branch_groups(bind, m.config, b, branch_nodes(bind, m.config, b, "u."), "u.");
  EXPECT_LE(max_abs_diff(a.weights, ge.attention.value()), 1e-12);
  for (std::size_t k = 0; k < 4; ++k) {
    double total = 0.0;
    for (std::size_t v = 0; v < a.weights.rows(); ++v) {
      total += a.weights(v, k);
      EXPECT_LE(a.weights(v, k), a.weights(a.argmax_node[k], k));
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Attention, BaselineHasNone) {
  const ModelState m = init_model(testing::small_config(Pipeline::kGraphCLBaseline), 6);
  EXPECT_THROW(export_attention(m, testing::small_dataset(2).graphs[0]), ContractError);
}

TEST(ParamCounts, ReferenceTable) {
  const HeadParamCounts c = count_head_params(4, 160, 100, 160);
  EXPECT_EQ(c.groupcl_head, 22800u);
  EXPECT_EQ(c.graphcl_head, 51200u);
  EXPECT_EQ(count_head_params(1, 160, 100, 160).groupcl_head, 41700u);
  EXPECT_THROW(count_head_params(3, 160, 100, 160), ConfigError);
}

TEST(ParamCounts, MatchInstantiatedRepresentorAndHead) {
  RunConfig c;
  c.d_n = 160;
  const ModelState g = init_model(c, 8);
  const std::size_t rep = g.params.at("u.rep.q").size() + g.params.at("u.rep.wk").size() + g.params.at("u.rep.wv").size();
  EXPECT_EQ(rep, count_head_params(4, 160, 100, 160).groupcl_head);
  c.pipeline = Pipeline::kGraphCLBaseline;
  const ModelState b = init_model(c, 8);
  EXPECT_EQ(b.params.at("u.head.w1").size() + b.params.at("u.head.w2").size(),
            count_head_params(4, 160, 100, 160).graphcl_head);
}

TEST(Writers, CsvShapes) {
  const EmbeddingTable t = toy_table(4, 0.1, 8);
  std::ostringstream e;
  write_embeddings_csv(t, e);
  const std::string text = e.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  EXPECT_EQ(text.substr(0, 14), "id,label,e0,e1");
  std::ostringstream m;
  write_matrix_csv(Matrix::identity(2), m);
  EXPECT_EQ(m.str(), "1,0\n0,1\n");
  std::ostringstream p;
  write_probe_text(linear_probe(toy_table(100, 0.01, 9), 1), p);
  EXPECT_NE(p.str().find("test_accuracy=1\n"), std::string::npos);
}

}  // namespace
}  // namespace groupcl
