// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "groupcl/tensor.hpp"

namespace groupcl {

/// Builds a scalar on a fresh tape from parameter leaves bound in order.
using ScalarFunction = std::function<Tensor(Tape&, std::span<const Tensor> params)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_parameter = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

/// Central finite differences against the tape gradient, coordinate by
/// coordinate. Relative error |a-n|/max(|a|,|n|), falling back to the
/// absolute difference when both magnitudes are below 1e-8. Throws
/// OracleInvalidError when two evaluations at the same point disagree.
GradCheckReport finite_difference_check(const ScalarFunction& f, std::span<const Matrix> params, double epsilon = 1e-5);

}  // namespace groupcl
