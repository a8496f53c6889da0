// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "groupcl/optim.hpp"
#include "groupcl/rng.hpp"
#include "groupcl/tensor.hpp"

namespace groupcl {

/// Places named parameters on a tape on first use, either as trainable
/// leaves or as constants, and maps the resulting gradients back to names.
class ParamBinder {
 public:
  ParamBinder(Tape& tape, const ParameterMap& params, bool trainable)
      : tape_(tape), params_(params), trainable_(trainable) {}

  Tensor operator()(const std::string& name);
  bool contains(const std::string& name) const { return params_.contains(name); }
  /// Binds `name` to an existing tensor (e.g. a gradient-check leaf) instead
  /// of creating one from the stored value. Shapes must match.
  void adopt(const std::string& name, const Tensor& t);
  Tape& tape() const { return tape_; }

  /// Gradient for every parameter in the map; zeros for those never bound.
  ParameterMap gradients(const GradientMap& grads) const;

 private:
  Tape& tape_;
  const ParameterMap& params_;
  bool trainable_;
  std::map<std::string, Tensor> bound_;
};

/// Uniform in [-a, a] with a = sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);
Matrix standard_normal(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0);

}  // namespace groupcl
