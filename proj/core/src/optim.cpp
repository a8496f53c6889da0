// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/optim.hpp"

#include <cmath>

#include "groupcl/error.hpp"

namespace groupcl {

AdamState make_adam_state(const ParameterMap& params, AdamOptions options) {
  AdamState state;
  state.options = options;
  for (const auto& [name, value] : params) {
    state.first_moment.emplace(name, Matrix(value.rows(), value.cols()));
    state.second_moment.emplace(name, Matrix(value.rows(), value.cols()));
  }
  return state;
}

void adam_step(ParameterMap& params, const ParameterMap& grads, AdamState& state) {
  const AdamOptions& o = state.options;
  if (!(o.learning_rate > 0.0)) throw ContractError("adam: step size must be positive");
  if (grads.size() != params.size()) {
    for (const auto& [name, g] : grads) {
      if (!params.contains(name)) throw ContractError("adam: gradient for unknown parameter '" + name + "'");
    }
  }
  for (const auto& [name, p] : params) {
    auto g = grads.find(name);
    if (g == grads.end()) throw ContractError("adam: missing gradient for parameter '" + name + "'");
    if (!g->second.same_shape(p)) {
      throw DimensionError("adam: gradient for '" + name + "' is " + g->second.shape_string() + ", parameter is " +
                           p.shape_string());
    }
    auto m = state.first_moment.find(name);
    auto v = state.second_moment.find(name);
    if (m == state.first_moment.end() || v == state.second_moment.end() || !m->second.same_shape(p) ||
        !v->second.same_shape(p)) {
      throw ContractError("adam: optimizer state does not match parameter '" + name + "'");
    }
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (auto& [name, p] : params) {
    const Matrix& g = grads.at(name);
    Matrix& m = state.first_moment.at(name);
    Matrix& v = state.second_moment.at(name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g[i];
      v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] -= o.learning_rate * mhat / (std::sqrt(vhat) + o.epsilon);
    }
  }
}

}  // namespace groupcl
