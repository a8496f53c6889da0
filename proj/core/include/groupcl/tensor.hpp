// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense 64-bit matrices and a recorded reverse-mode differentiation tape.
//
// Every value is a row-major matrix; vectors are 1×n rows and scalars are
// 1×1. A Tape (the computation record) owns all node values. A Tensor is a
// cheap handle {tape, node id}. Nodes created from constants never receive
// gradients; nodes created with Tape::parameter are differentiable leaves.

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <deque>
#include <vector>

namespace groupcl {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix row(std::initializer_list<double> values);
  static Matrix scalar(double v) { return Matrix(1, 1, v); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> row_span(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row_span(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  std::string shape_string() const;
  bool same_shape(const Matrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Maximum absolute elementwise difference; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);

class Tape;

class Tensor {
 public:
  Tensor() = default;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  std::size_t id() const noexcept { return id_; }
  Tape& tape() const { return *tape_; }
  bool valid() const noexcept { return tape_ != nullptr; }
  bool requires_grad() const;
  /// Convenience for 1×1 tensors.
  double item() const;

 private:
  friend class Tape;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Gradients produced by one backward pass, indexed by node id.
class GradientMap {
 public:
  GradientMap() = default;
  explicit GradientMap(std::vector<Matrix> grads) : grads_(std::move(grads)) {}

  /// Gradient with respect to `t`; zeros for nodes the loss does not reach.
  const Matrix& of(const Tensor& t) const { return grads_.at(t.id()); }

 private:
  std::vector<Matrix> grads_;
};

/// Computation record. Single writer: one training step builds and consumes
/// one tape. Node ids are assigned in creation order, so every input id is
/// smaller than the id of the node it feeds.
class Tape {
 public:
  using BackwardFn = std::function<void(const Matrix& out_grad, std::vector<Matrix>& grads)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor constant(Matrix value);
  Tensor parameter(Matrix value);

  /// Records the output of a primitive. `inputs` are the node ids it reads;
  /// `backward` accumulates input gradients given the output gradient.
  Tensor record(std::string op, Matrix value, std::vector<std::size_t> inputs, BackwardFn backward);

  /// Reverse sweep from a 1×1 loss; visits each reachable node once.
  GradientMap backward(const Tensor& loss) const;

  const Matrix& value(std::size_t id) const { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  const std::string& op(std::size_t id) const { return nodes_.at(id).op; }
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_.at(id).inputs; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    std::string op;
    Matrix value;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
  };
  std::deque<Node> nodes_;  // stable references across push_back
};

/// Compressed neighbor lists for a batched node set (both directions stored).
struct Adjacency {
  std::vector<std::size_t> offsets;  // size num_nodes + 1
  std::vector<std::size_t> neighbors;
  std::size_t num_nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

/// Segment boundaries: segment s covers rows [bounds[s], bounds[s+1]).
using SegmentBounds = std::vector<std::size_t>;

// ---------------------------------------------------------------------------
// Primitives. Each checks shapes (DimensionError) and output finiteness
// (NumericError), and records itself when any input requires a gradient.
// ---------------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
/// a + b; `b` may also be a 1×cols row (broadcast over rows) or 1×1.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
/// Elementwise product; `b` may broadcast like in add().
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor transpose(const Tensor& a);
Tensor relu(const Tensor& a);
/// Softmax across the columns of each row.
Tensor row_softmax(const Tensor& a);
/// Softmax down the rows of each segment, independently per column.
Tensor segment_softmax(const Tensor& a, const SegmentBounds& segments);
/// log(1 + e^x), evaluated as max(x,0) + log1p(e^{-|x|}).
Tensor softplus(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// axis 0 stacks rows, axis 1 stacks columns.
Tensor concat(std::span<const Tensor> parts, int axis);
/// Rows with norm below 1e-12 raise NumericError.
Tensor row_l2_normalize(const Tensor& a);
Tensor square(const Tensor& a);
Tensor negate(const Tensor& a);

// Structural primitives used by graph models.

/// Row gather: out[i] = a[indices[i]]. Indices may repeat.
Tensor select_rows(const Tensor& a, std::span<const std::size_t> indices);
/// Row-major reinterpretation with the same element count.
Tensor reshape(const Tensor& a, std::size_t rows, std::size_t cols);
/// out[v] = sum over neighbors u of v of a[u].
Tensor neighbor_sum(const Tensor& a, const Adjacency& adjacency);
/// out[s] = sum of rows in segment s.
Tensor segment_sum(const Tensor& a, const SegmentBounds& segments);
/// Attention pooling. weights is N×p, values N×d. Output has one row per
/// (segment s, column k) at index s*p + k: sum over rows v of segment s of
/// weights[v,k] * values[v].
Tensor segment_weighted_sum(const Tensor& weights, const Tensor& values, const SegmentBounds& segments);

/// Constant copy of `t`'s value on the same tape; gradients stop here.
Tensor detach(const Tensor& t);

/// The closed set of named primitives, for generic dispatch (gradient
/// sweeps, benchmarks). Structural primitives take extra arguments and are
/// called directly.
enum class OpKind {
  kMatmul, kAdd, kMul, kScale, kTranspose, kRelu, kRowSoftmax, kSegmentRowSoftmax,
  kSoftplus, kExp, kLog, kSum, kMean, kConcat, kRowL2Normalize, kSquare, kNegate,
};

struct OpArgs {
  double scalar = 1.0;           // kScale
  int axis = 0;                  // kConcat
  SegmentBounds segments;        // kSegmentRowSoftmax
};

std::string_view op_name(OpKind kind);
std::span<const OpKind> all_op_kinds();

/// Applies `kind` to `inputs`, checking arity.
Tensor primitive_forward(OpKind kind, std::span<const Tensor> inputs, const OpArgs& args = {});

}  // namespace groupcl
