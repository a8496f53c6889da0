// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "groupcl/error.hpp"
#include "groupcl/gradcheck.hpp"
#include "groupcl/optim.hpp"
#include "groupcl/params.hpp"
#include "groupcl/rng.hpp"
#include "support/test_support.hpp"

namespace groupcl {
namespace {

TEST(Adam, FirstStepMovesByLearningRate) {
  ParameterMap params{{"x", Matrix::scalar(1.0)}};
  AdamState state = make_adam_state(params);
  adam_step(params, {{"x", Matrix::scalar(1.0)}}, state);
  EXPECT_NEAR(params["x"][0], 0.999, 1e-9);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, ZeroGradientKeepsParamsAndDecaysMoments) {
  ParameterMap params{{"x", Matrix::row({1.0, -2.0})}};
  AdamState state = make_adam_state(params);
  adam_step(params, {{"x", Matrix::row({1.0, 1.0})}}, state);
  const ParameterMap before = params;
  const Matrix m1 = state.first_moment["x"];
  const Matrix v1 = state.second_moment["x"];
  adam_step(params, {{"x", Matrix(1, 2)}}, state);
  EXPECT_NEAR(state.first_moment["x"][0], 0.9 * m1[0], 1e-15);
  EXPECT_NEAR(state.second_moment["x"][0], 0.999 * v1[0], 1e-15);
  // Momentum still moves the parameter; a fresh state with zero gradient does not.
  ParameterMap fresh = before;
  AdamState s2 = make_adam_state(fresh);
  adam_step(fresh, {{"x", Matrix(1, 2)}}, s2);
  EXPECT_EQ(fresh, before);
}

TEST(Adam, RepeatedRunsAreBitwiseEqual) {
  auto run = [] {
    ParameterMap params{{"w", Matrix::row({0.3, -0.7, 1.1})}};
    AdamState state = make_adam_state(params, {.learning_rate = 0.01});
    for (int i = 0; i < 5; ++i) adam_step(params, {{"w", Matrix::row({0.1 * i, -0.2, 0.05})}}, state);
    return params;
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, MissingOrMismatchedGradientIsContractError) {
  ParameterMap params{{"a", Matrix::scalar(1.0)}, {"b", Matrix::scalar(1.0)}};
  AdamState state = make_adam_state(params);
  EXPECT_THROW(adam_step(params, {{"a", Matrix::scalar(1.0)}}, state), ContractError);
  EXPECT_THROW(adam_step(params, {{"a", Matrix::scalar(1.0)}, {"b", Matrix(1, 2)}}, state), Error);
}

TEST(Adam, MinimizesQuadratic) {
  ParameterMap params{{"x", Matrix::row({3.0, -4.0})}};
  AdamState state = make_adam_state(params, {.learning_rate = 0.1});
  for (int i = 0; i < 500; ++i) {
    Matrix g = params["x"];
    for (double& v : g.data()) v *= 2.0;
    adam_step(params, {{"x", g}}, state);
  }
  EXPECT_LT(std::abs(params["x"][0]), 1e-2);
  EXPECT_LT(std::abs(params["x"][1]), 1e-2);
}

TEST(GradCheck, SumOfSquaresIsExact) {
  Rng rng(1);
  const Matrix x = testing::random_matrix(1, 10, rng);
  const auto report = finite_difference_check(
      [](Tape&, std::span<const Tensor> p) { return sum(square(p[0])); }, std::span<const Matrix>(&x, 1));
  EXPECT_LT(report.max_relative_error, 1e-6);
  EXPECT_EQ(report.coordinates, 10u);
}

TEST(GradCheck, ConstantFunctionHasZeroError) {
  const Matrix x = Matrix::row({1.0, 2.0});
  const auto report = finite_difference_check(
      [](Tape& t, std::span<const Tensor>) { return t.constant(Matrix::scalar(4.0)); },
      std::span<const Matrix>(&x, 1));
  EXPECT_EQ(report.max_relative_error, 0.0);
  EXPECT_EQ(report.analytic, 0.0);
  EXPECT_EQ(report.numeric, 0.0);
}

TEST(GradCheck, DetectsWrongGradient) {
  // detach hides a dependence from the tape, so analytic and numeric disagree.
  const Matrix x = Matrix::row({0.7, -1.3});
  const auto report = finite_difference_check(
      [](Tape&, std::span<const Tensor> p) { return sum(mul(p[0], detach(p[0]))); }, std::span<const Matrix>(&x, 1));
  EXPECT_GT(report.max_relative_error, 0.1);
}

TEST(GradCheck, NonDeterministicFunctionIsRejected) {
  const Matrix x = Matrix::scalar(1.0);
  int calls = 0;
  EXPECT_THROW(finite_difference_check(
                   [&calls](Tape&, std::span<const Tensor> p) { return scale(sum(p[0]), 1.0 + ++calls); },
                   std::span<const Matrix>(&x, 1)),
               OracleInvalidError);
}

TEST(Rng, DerivedStreamsAreReproducibleAndDistinct) {
  Rng a = Rng::derive(5, "shuffle", {3});
  Rng b = Rng::derive(5, "shuffle", {3});
  Rng c = Rng::derive(5, "shuffle", {4});
  Rng d = Rng::derive(5, "init");
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(x, d.next_u64());
}

TEST(Rng, UniformAndIndexStayInRange) {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(rng.index(7), 7u);
  }
}

TEST(Rng, NormalMomentsAreStandard) {
  Rng rng(10);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  // 5-sigma bounds on the sample mean and variance.
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(Rng, SampleWithoutReplacementIsDistinct) {
  Rng rng(11);
  auto s = rng.sample_without_replacement(20, 8);
  std::sort(s.begin(), s.end());
  EXPECT_EQ(std::unique(s.begin(), s.end()), s.end());
  EXPECT_EQ(s.size(), 8u);
  EXPECT_LT(s.back(), 20u);
}

TEST(ParamBinder, AdoptedLeafReceivesGradient) {
  ParameterMap params{{"w", Matrix::row({1.0, 2.0})}, {"unused", Matrix(2, 2)}};
  Tape tape;
  ParamBinder bind(tape, params, false);
  const Tensor leaf = tape.parameter(Matrix::row({3.0, -1.0}));
  bind.adopt("w", leaf);
  EXPECT_THROW(bind.adopt("w", leaf), ContractError);
  EXPECT_THROW(bind.adopt("unused", leaf), DimensionError);
  EXPECT_THROW(bind.adopt("missing", leaf), ContractError);
  const ParameterMap g = bind.gradients(tape.backward(sum(square(bind("w")))));
  EXPECT_EQ(g.at("w"), Matrix::row({6.0, -2.0}));
  EXPECT_EQ(g.at("unused"), Matrix(2, 2));
}

}  // namespace
}  // namespace groupcl
