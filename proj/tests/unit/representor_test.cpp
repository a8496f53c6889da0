// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "groupcl/error.hpp"
#include "groupcl/representor.hpp"
#include "support/test_support.hpp"

namespace groupcl {
namespace {

using testing::random_matrix;

TEST(Representor, IdentityKeyProjection) {
  Rng rng(31);
  Tape tape;
  const Matrix u = random_matrix(5, 4, rng);
  const RepresentorParams p{tape.constant(Matrix::identity(4)), tape.constant(random_matrix(4, 2, rng)),
                            tape.constant(random_matrix(4, 3, rng))};
  const auto [k, v] = project_kv(tape.constant(u), p);
  EXPECT_EQ(k.value(), u);
  const auto [k0, v0] = project_kv(tape.constant(Matrix(5, 4)), p);
  EXPECT_EQ(k0.value(), Matrix(5, 4));
  EXPECT_EQ(v0.value(), Matrix(5, 2));
}

TEST(Representor, ReferenceShapes) {
  Rng rng(32);
  ParameterMap params;
  const RepresentorShape shape{160, 100, 4, 160};
  init_representor(params, "u.", shape, rng);
  EXPECT_EQ(shape.value_dim(), 40u);
  Tape tape;
  ParamBinder bind(tape, params, false);
  const auto [k, v] = project_kv(tape.constant(random_matrix(7, 160, rng)), bind_representor(bind, "u."));
  EXPECT_EQ(k.rows(), 7u);
  EXPECT_EQ(k.cols(), 100u);
  EXPECT_EQ(v.cols(), 40u);
  EXPECT_EQ(params["u.rep.q"].rows(), 100u);
  EXPECT_EQ(params["u.rep.q"].cols(), 4u);
}

TEST(Representor, IndivisibleWidthIsConfigError) {
  EXPECT_THROW((RepresentorShape{160, 100, 3, 160}.value_dim()), ConfigError);
}

TEST(Attention, IdenticalKeysGiveUniformWeights) {
  Rng rng(33);
  Tape tape;
  Matrix keys(3, 4);
  const Matrix row = random_matrix(1, 4, rng);
  for (std::size_t r = 0; r < 3; ++r) std::copy_n(row.data().begin(), 4, keys.row_span(r).begin());
  const Matrix a = attention(tape.constant(keys), tape.constant(random_matrix(4, 2, rng)), {0, 3}).value();
  for (double w : a.data()) EXPECT_NEAR(w, 1.0 / 3.0, 1e-15);
}

TEST(Attention, LargeMarginDominates) {
  Tape tape;
  const Matrix keys = Matrix::from_rows({{20.0}, {0.0}, {0.0}});
  const Matrix a = attention(tape.constant(keys), tape.constant(Matrix::scalar(1.0)), {0, 3}).value();
  EXPECT_GT(a(0, 0), 0.999);
}

TEST(Attention, ColumnsSumToOnePerGraph) {
  Rng rng(34);
  Tape tape;
  const SegmentBounds seg = {0, 2, 6};
  const Matrix a = attention(tape.constant(random_matrix(6, 3, rng)), tape.constant(random_matrix(3, 4, rng)), seg).value();
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t k = 0; k < 4; ++k) {
      double t = 0.0;
      for (std::size_t v = seg[s]; v < seg[s + 1]; ++v) t += a(v, k);
      EXPECT_NEAR(t, 1.0, 1e-12);
    }
}

TEST(GroupEmbed, SingleNodeIsNormalizedValue) {
  Tape tape;
  const Matrix v = Matrix::row({3.0, 4.0});
  const GroupEmbeddings ge = group_embed(tape.constant(v), tape.constant(Matrix(1, 3, 1.0)), {0, 1});
  ASSERT_EQ(ge.p, 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(ge.groups.value()(k, 0), 0.6, 1e-15);
    EXPECT_NEAR(ge.groups.value()(k, 1), 0.8, 1e-15);
  }
}

TEST(GroupEmbed, MatchesNaiveWeightedSum) {
  Rng rng(35);
  Tape tape;
  const Matrix values = random_matrix(5, 3, rng);
  const Matrix logits = random_matrix(5, 2, rng);
  const SegmentBounds seg = {0, 5};
  const Tensor attn = segment_softmax(tape.constant(logits), seg);
  const GroupEmbeddings ge = group_embed(tape.constant(values), attn, seg);
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> acc(3, 0.0);
    for (std::size_t v = 0; v < 5; ++v)
      for (std::size_t c = 0; c < 3; ++c) acc[c] += attn.value()(v, k) * values(v, c);
    double n = 0.0;
    for (double x : acc) n += x * x;
    n = std::sqrt(n);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(ge.groups.value()(k, c), acc[c] / n, 1e-12);
  }
}

TEST(Represent, InvariantToNodeOrder) {
  Rng rng(36);
  ParameterMap params;
  init_representor(params, "u.", {4, 3, 2, 6}, rng);
  const Matrix nodes = random_matrix(5, 4, rng);
  Matrix reversed(5, 4);
  for (std::size_t v = 0; v < 5; ++v) std::copy_n(nodes.row_span(v).begin(), 4, reversed.row_span(4 - v).begin());
  Tape tape;
  ParamBinder bind(tape, params, false);
  const auto rp = bind_representor(bind, "u.");
  const Matrix a = represent(tape.constant(nodes), {0, 5}, rp).groups.value();
  const Matrix b = represent(tape.constant(reversed), {0, 5}, rp).groups.value();
  EXPECT_LT(max_abs_diff(a, b), 1e-12);
}

TEST(ConcatGroups, LayoutAndWidth) {
  Rng rng(37);
  Tape tape;
  const Matrix rows = testing::random_unit_rows(2 * 4, 40, rng);
  const GroupEmbeddings ge = GroupEmbeddings::from_rows(tape.constant(rows), 2, 4);
  const Matrix c = concat_groups(ge).value();
  EXPECT_EQ(c.rows(), 2u);
  EXPECT_EQ(c.cols(), 160u);
  EXPECT_EQ(c(1, 40 * 2 + 5), rows(1 * 4 + 2, 5));
  const GroupEmbeddings one = GroupEmbeddings::from_rows(tape.constant(rows), 8, 1);
  EXPECT_EQ(concat_groups(one).value(), rows);
}

TEST(Duplicate, CopiesAreExact) {
  const Matrix r = Matrix::row({0.1, 0.2, 0.3});
  EXPECT_EQ(duplicate_rep(r, 1), std::vector<Matrix>{r});
  for (const Matrix& m : duplicate_rep(r, 4)) EXPECT_EQ(m, r);
  Tape tape;
  const Matrix rows = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  const Matrix d = duplicate_rows(tape.constant(rows), 3).value();
  ASSERT_EQ(d.rows(), 6u);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(d(k * 2 + i, c), rows(i, c));
}

}  // namespace
}  // namespace groupcl
