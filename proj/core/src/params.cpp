// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/params.hpp"

#include <cmath>

#include "groupcl/error.hpp"

namespace groupcl {

Tensor ParamBinder::operator()(const std::string& name) {
  if (auto it = bound_.find(name); it != bound_.end()) return it->second;
  auto p = params_.find(name);
  if (p == params_.end()) throw ContractError("parameter '" + name + "' is not in the model");
  Tensor t = trainable_ ? tape_.parameter(p->second) : tape_.constant(p->second);
  bound_.emplace(name, t);
  return t;
}

void ParamBinder::adopt(const std::string& name, const Tensor& t) {
  auto p = params_.find(name);
  if (p == params_.end()) throw ContractError("parameter '" + name + "' is not in the model");
  if (p->second.rows() != t.rows() || p->second.cols() != t.cols()) {
    throw DimensionError("adopt: shape mismatch for parameter '" + name + "'");
  }
  if (!bound_.emplace(name, t).second) throw ContractError("adopt: parameter '" + name + "' is already bound");
}

ParameterMap ParamBinder::gradients(const GradientMap& grads) const {
  ParameterMap out;
  for (const auto& [name, value] : params_) {
    auto it = bound_.find(name);
    out.emplace(name, it == bound_.end() ? Matrix(value.rows(), value.cols()) : grads.of(it->second));
  }
  return out;
}

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (double& v : m.data()) v = rng.uniform(-a, a);
  return m;
}

Matrix standard_normal(std::size_t rows, std::size_t cols, Rng& rng, double scale) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

}  // namespace groupcl
