// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>

#include "groupcl/error.hpp"
#include "groupcl/tensor.hpp"

namespace groupcl {

namespace {

constexpr std::array kAllOps = {
    OpKind::kMatmul,  OpKind::kAdd,    OpKind::kMul,           OpKind::kScale,  OpKind::kTranspose,
    OpKind::kRelu,    OpKind::kRowSoftmax, OpKind::kSegmentRowSoftmax, OpKind::kSoftplus, OpKind::kExp,
    OpKind::kLog,     OpKind::kSum,    OpKind::kMean,          OpKind::kConcat, OpKind::kRowL2Normalize,
    OpKind::kSquare,  OpKind::kNegate,
};

void expect_arity(OpKind kind, std::span<const Tensor> inputs, std::size_t n) {
  if (inputs.size() != n) {
    throw DimensionError(std::string(op_name(kind)) + ": expected " + std::to_string(n) + " inputs, got " +
                         std::to_string(inputs.size()));
  }
}

}  // namespace

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kMul: return "elementwise-multiply";
    case OpKind::kScale: return "scalar-multiply";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kRelu: return "relu";
    case OpKind::kRowSoftmax: return "row-softmax";
    case OpKind::kSegmentRowSoftmax: return "segment-row-softmax";
    case OpKind::kSoftplus: return "softplus";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kConcat: return "concat-along-axis";
    case OpKind::kRowL2Normalize: return "row-L2-normalize";
    case OpKind::kSquare: return "square";
    case OpKind::kNegate: return "negate";
  }
  return "unknown";
}

std::span<const OpKind> all_op_kinds() { return kAllOps; }

Tensor primitive_forward(OpKind kind, std::span<const Tensor> inputs, const OpArgs& args) {
  if (kind == OpKind::kConcat) {
    if (inputs.empty()) throw DimensionError("concat-along-axis: no inputs");
    return concat(inputs, args.axis);
  }
  const bool binary = kind == OpKind::kMatmul || kind == OpKind::kAdd || kind == OpKind::kMul;
  expect_arity(kind, inputs, binary ? 2 : 1);
  const Tensor& a = inputs[0];
  switch (kind) {
    case OpKind::kMatmul: return matmul(a, inputs[1]);
    case OpKind::kAdd: return add(a, inputs[1]);
    case OpKind::kMul: return mul(a, inputs[1]);
    case OpKind::kScale: return scale(a, args.scalar);
    case OpKind::kTranspose: return transpose(a);
    case OpKind::kRelu: return relu(a);
    case OpKind::kRowSoftmax: return row_softmax(a);
    case OpKind::kSegmentRowSoftmax: return segment_softmax(a, args.segments);
    case OpKind::kSoftplus: return softplus(a);
    case OpKind::kExp: return exp(a);
    case OpKind::kLog: return log(a);
    case OpKind::kSum: return sum(a);
    case OpKind::kMean: return mean(a);
    case OpKind::kRowL2Normalize: return row_l2_normalize(a);
    case OpKind::kSquare: return square(a);
    case OpKind::kNegate: return negate(a);
    case OpKind::kConcat: break;
  }
  throw ContractError("primitive_forward: unhandled op");
}

}  // namespace groupcl
