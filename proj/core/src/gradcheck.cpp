// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/gradcheck.hpp"

#include <cmath>

#include "groupcl/error.hpp"

namespace groupcl {

namespace {

double evaluate(const ScalarFunction& f, const std::vector<Matrix>& params) {
  Tape tape;
  std::vector<Tensor> leaves;
  leaves.reserve(params.size());
  for (const Matrix& p : params) leaves.push_back(tape.constant(p));
  return f(tape, leaves).item();
}

}  // namespace

GradCheckReport finite_difference_check(const ScalarFunction& f, std::span<const Matrix> params, double epsilon) {
  if (!(epsilon > 0.0)) throw ContractError("finite_difference_check: epsilon must be positive");
  std::vector<Matrix> point(params.begin(), params.end());

  Tape tape;
  std::vector<Tensor> leaves;
  for (const Matrix& p : point) leaves.push_back(tape.parameter(p));
  const Tensor loss = f(tape, leaves);
  const GradientMap grads = tape.backward(loss);

  const double base = evaluate(f, point);
  if (base != loss.item() || evaluate(f, point) != base) {
    throw OracleInvalidError("finite_difference_check: function is not deterministic");
  }

  GradCheckReport report;
  for (std::size_t pi = 0; pi < point.size(); ++pi) {
    const Matrix& analytic = grads.of(leaves[pi]);
    for (std::size_t i = 0; i < point[pi].size(); ++i) {
      const double saved = point[pi][i];
      point[pi][i] = saved + epsilon;
      const double up = evaluate(f, point);
      point[pi][i] = saved - epsilon;
      const double down = evaluate(f, point);
      point[pi][i] = saved;

      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[i];
      const double scale = std::max(std::abs(a), std::abs(numeric));
      const double err = scale < 1e-8 ? std::abs(a - numeric) : std::abs(a - numeric) / scale;
      ++report.coordinates;
      if (err > report.max_relative_error || report.coordinates == 1) {
        report.max_relative_error = err;
        report.worst_parameter = pi;
        report.worst_index = i;
        report.analytic = a;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace groupcl
