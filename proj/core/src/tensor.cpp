// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "groupcl/error.hpp"

namespace groupcl {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix: " + std::to_string(data_.size()) + " values for shape " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("matrix: ragged row list");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(values));
}

Matrix Matrix::row(std::initializer_list<double> values) {
  return Matrix(1, values.size(), std::vector<double>(values));
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("max_abs_diff: " + a.shape_string() + " vs " + b.shape_string());
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

const Matrix& Tensor::value() const {
  if (tape_ == nullptr) throw ContractError("tensor: use of an unbound tensor");
  return tape_->value(id_);
}

bool Tensor::requires_grad() const { return tape_ != nullptr && tape_->requires_grad(id_); }

double Tensor::item() const {
  const Matrix& v = value();
  if (v.size() != 1) throw DimensionError("item: tensor is " + v.shape_string() + ", not 1x1");
  return v[0];
}

Tensor Tape::constant(Matrix value) {
  if (!value.all_finite()) throw NumericError("constant: non-finite value");
  nodes_.push_back(Node{"constant", std::move(value), {}, nullptr, false});
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::parameter(Matrix value) {
  if (!value.all_finite()) throw NumericError("parameter: non-finite value");
  nodes_.push_back(Node{"parameter", std::move(value), {}, nullptr, true});
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::record(std::string op, Matrix value, std::vector<std::size_t> inputs, BackwardFn backward) {
  if (!value.all_finite()) throw NumericError(op + ": non-finite output");
  bool differentiable = false;
  for (std::size_t id : inputs) differentiable = differentiable || nodes_.at(id).requires_grad;
  if (!differentiable) backward = nullptr;
  nodes_.push_back(Node{std::move(op), std::move(value), std::move(inputs), std::move(backward), differentiable});
  return Tensor(this, nodes_.size() - 1);
}

GradientMap Tape::backward(const Tensor& loss) const {
  if (&loss.tape() != this) throw ContractError("backward: loss belongs to another tape");
  const Matrix& lv = value(loss.id());
  if (lv.size() != 1) throw ContractError("backward: loss must be scalar, got " + lv.shape_string());
  std::vector<Matrix> grads(nodes_.size());
  grads[loss.id()] = Matrix(1, 1, 1.0);
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!n.requires_grad || !n.backward || grads[id].empty()) continue;
    n.backward(grads[id], grads);
  }
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (grads[id].empty()) grads[id] = Matrix(nodes_[id].value.rows(), nodes_[id].value.cols());
  }
  return GradientMap(std::move(grads));
}

namespace {

// Adds `g` into the gradient slot of node `id`, allocating it on first use.
Matrix& grad_slot(std::vector<Matrix>& grads, const Tape& tape, std::size_t id) {
  Matrix& slot = grads[id];
  if (slot.empty()) slot = Matrix(tape.value(id).rows(), tape.value(id).cols());
  return slot;
}

void accumulate(std::vector<Matrix>& grads, const Tape& tape, std::size_t id, const Matrix& g) {
  if (!tape.requires_grad(id)) return;
  Matrix& slot = grad_slot(grads, tape, id);
  for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i];
}

Tape& same_tape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.valid() || !b.valid() || &a.tape() != &b.tape()) {
    throw ContractError(std::string(op) + ": operands on different tapes");
  }
  return a.tape();
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " + b.shape_string());
}

// c += a * b (row-major, i-k-j order).
void gemm_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  const double* ad = a.data().data();
  const double* bd = b.data().data();
  double* cd = c.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = cd + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ad[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bd + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += aip * brow[j];
    }
  }
}

// c += a * b^T
void gemm_nt_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a.data().data() + i * k;
    for (std::size_t j = 0; j < m; ++j) {
      const double* brow = b.data().data() + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      c(i, j) += s;
    }
  }
}

// c += a^T * b
void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t r = 0; r < n; ++r) {
    const double* arow = a.data().data() + r * k;
    const double* brow = b.data().data() + r * m;
    for (std::size_t i = 0; i < k; ++i) {
      const double ai = arow[i];
      if (ai == 0.0) continue;
      double* crow = c.data().data() + i * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += ai * brow[j];
    }
  }
}

enum class Broadcast { kNone, kRow, kScalar };

Broadcast broadcast_kind(const char* op, const Matrix& a, const Matrix& b) {
  if (a.same_shape(b)) return Broadcast::kNone;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::kRow;
  if (b.size() == 1) return Broadcast::kScalar;
  shape_error(op, a, b);
}

std::size_t bindex(Broadcast kind, std::size_t i, std::size_t cols) {
  switch (kind) {
    case Broadcast::kNone: return i;
    case Broadcast::kRow: return i % cols;
    case Broadcast::kScalar: return 0;
  }
  return 0;
}

// Reduces a full-shape gradient onto the broadcast operand's shape.
Matrix reduce_broadcast(Broadcast kind, const Matrix& g, const Matrix& b_shape) {
  if (kind == Broadcast::kNone) return g;
  Matrix out(b_shape.rows(), b_shape.cols());
  for (std::size_t i = 0; i < g.size(); ++i) out[bindex(kind, i, g.cols())] += g[i];
  return out;
}

template <class F, class D>
Tensor unary(const char* op, const Tensor& a, F f, D dfdx) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  Matrix out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  const std::size_t ia = a.id();
  std::size_t out_id = tape.size();
  return tape.record(op, std::move(out), {ia}, [&tape, ia, out_id, dfdx](const Matrix& g, std::vector<Matrix>& grads) {
    const Matrix& x = tape.value(ia);
    const Matrix& y = tape.value(out_id);
    Matrix& slot = grad_slot(grads, tape, ia);
    for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i] * dfdx(x[i], y[i]);
  });
}

double stable_softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  Tape& tape = same_tape(a, b, "matmul");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
  Matrix out(av.rows(), bv.cols());
  gemm_acc(av, bv, out);
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record("matmul", std::move(out), {ia, ib}, [&tape, ia, ib](const Matrix& g, std::vector<Matrix>& grads) {
    if (tape.requires_grad(ia)) gemm_nt_acc(g, tape.value(ib), grad_slot(grads, tape, ia));
    if (tape.requires_grad(ib)) gemm_tn_acc(tape.value(ia), g, grad_slot(grads, tape, ib));
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  Tape& tape = same_tape(a, b, "add");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  const Broadcast kind = broadcast_kind("add", av, bv);
  Matrix out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[bindex(kind, i, av.cols())];
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record("add", std::move(out), {ia, ib}, [&tape, ia, ib, kind](const Matrix& g, std::vector<Matrix>& grads) {
    accumulate(grads, tape, ia, g);
    if (tape.requires_grad(ib)) accumulate(grads, tape, ib, reduce_broadcast(kind, g, tape.value(ib)));
  });
}

Tensor sub(const Tensor& a, const Tensor& b) { return add(a, negate(b)); }

Tensor mul(const Tensor& a, const Tensor& b) {
  Tape& tape = same_tape(a, b, "mul");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  const Broadcast kind = broadcast_kind("mul", av, bv);
  Matrix out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[bindex(kind, i, av.cols())];
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record("mul", std::move(out), {ia, ib}, [&tape, ia, ib, kind](const Matrix& g, std::vector<Matrix>& grads) {
    const Matrix& x = tape.value(ia);
    const Matrix& y = tape.value(ib);
    if (tape.requires_grad(ia)) {
      Matrix& slot = grad_slot(grads, tape, ia);
      for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i] * y[bindex(kind, i, x.cols())];
    }
    if (tape.requires_grad(ib)) {
      Matrix& slot = grad_slot(grads, tape, ib);
      for (std::size_t i = 0; i < g.size(); ++i) slot[bindex(kind, i, x.cols())] += g[i] * x[i];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  return unary("scale", a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor negate(const Tensor& a) {
  return unary("negate", a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor relu(const Tensor& a) {
  return unary("relu", a, [](double x) { return x > 0 ? x : 0.0; }, [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor softplus(const Tensor& a) {
  return unary("softplus", a, stable_softplus, [](double x, double) { return sigmoid(x); });
}

Tensor exp(const Tensor& a) {
  return unary("exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  for (double v : a.value().data()) {
    if (!(v > 0.0)) throw NumericError("log: non-positive input");
  }
  return unary("log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor square(const Tensor& a) {
  return unary("square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor transpose(const Tensor& a) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  Matrix out(av.cols(), av.rows());
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out(c, r) = av(r, c);
  const std::size_t ia = a.id();
  return tape.record("transpose", std::move(out), {ia}, [&tape, ia](const Matrix& g, std::vector<Matrix>& grads) {
    Matrix& slot = grad_slot(grads, tape, ia);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) slot(c, r) += g(r, c);
  });
}

Tensor row_softmax(const Tensor& a) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  if (av.cols() == 0) throw DimensionError("row_softmax: zero columns");
  Matrix out(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    auto in = av.row_span(r);
    auto o = out.row_span(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) z += (o[c] = std::exp(in[c] - mx));
    for (double& v : o) v /= z;
  }
  const std::size_t ia = a.id();
  const std::size_t out_id = tape.size();
  return tape.record("row_softmax", std::move(out), {ia}, [&tape, ia, out_id](const Matrix& g, std::vector<Matrix>& grads) {
    const Matrix& y = tape.value(out_id);
    Matrix& slot = grad_slot(grads, tape, ia);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) slot(r, c) += y(r, c) * (g(r, c) - dot);
    }
  });
}

namespace {

void check_segments(const char* op, const SegmentBounds& segments, std::size_t rows) {
  if (segments.size() < 2 || segments.front() != 0 || segments.back() != rows) {
    throw DimensionError(std::string(op) + ": segment bounds do not cover " + std::to_string(rows) + " rows");
  }
  for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
    if (segments[s + 1] <= segments[s]) throw DimensionError(std::string(op) + ": empty segment " + std::to_string(s));
  }
}

}  // namespace

Tensor segment_softmax(const Tensor& a, const SegmentBounds& segments) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  check_segments("segment_softmax", segments, av.rows());
  Matrix out(av.rows(), av.cols());
  for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
    const std::size_t lo = segments[s], hi = segments[s + 1];
    for (std::size_t c = 0; c < av.cols(); ++c) {
      double mx = av(lo, c);
      for (std::size_t r = lo + 1; r < hi; ++r) mx = std::max(mx, av(r, c));
      double z = 0.0;
      for (std::size_t r = lo; r < hi; ++r) z += (out(r, c) = std::exp(av(r, c) - mx));
      for (std::size_t r = lo; r < hi; ++r) out(r, c) /= z;
    }
  }
  const std::size_t ia = a.id();
  const std::size_t out_id = tape.size();
  return tape.record("segment_softmax", std::move(out), {ia},
                     [&tape, ia, out_id, segments](const Matrix& g, std::vector<Matrix>& grads) {
                       const Matrix& y = tape.value(out_id);
                       Matrix& slot = grad_slot(grads, tape, ia);
                       for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
                         const std::size_t lo = segments[s], hi = segments[s + 1];
                         for (std::size_t c = 0; c < y.cols(); ++c) {
                           double dot = 0.0;
                           for (std::size_t r = lo; r < hi; ++r) dot += g(r, c) * y(r, c);
                           for (std::size_t r = lo; r < hi; ++r) slot(r, c) += y(r, c) * (g(r, c) - dot);
                         }
                       }
                     });
}

Tensor sum(const Tensor& a) {
  Tape& tape = a.tape();
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  const std::size_t ia = a.id();
  return tape.record("sum", Matrix(1, 1, s), {ia}, [&tape, ia](const Matrix& g, std::vector<Matrix>& grads) {
    Matrix& slot = grad_slot(grads, tape, ia);
    for (double& v : slot.data()) v += g[0];
  });
}

Tensor mean(const Tensor& a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw DimensionError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Tensor concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  if (axis != 0 && axis != 1) throw DimensionError("concat: axis must be 0 or 1");
  Tape& tape = parts.front().tape();
  std::vector<std::size_t> ids;
  std::size_t rows = 0, cols = 0;
  for (const Tensor& t : parts) {
    if (&t.tape() != &tape) throw ContractError("concat: operands on different tapes");
    const Matrix& v = t.value();
    if (axis == 0) {
      if (!ids.empty() && v.cols() != cols) shape_error("concat", parts.front().value(), v);
      cols = v.cols();
      rows += v.rows();
    } else {
      if (!ids.empty() && v.rows() != rows) shape_error("concat", parts.front().value(), v);
      rows = v.rows();
      cols += v.cols();
    }
    ids.push_back(t.id());
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const Tensor& t : parts) {
    const Matrix& v = t.value();
    for (std::size_t r = 0; r < v.rows(); ++r)
      for (std::size_t c = 0; c < v.cols(); ++c) {
        if (axis == 0) out(offset + r, c) = v(r, c);
        else out(r, offset + c) = v(r, c);
      }
    offset += axis == 0 ? v.rows() : v.cols();
  }
  return tape.record("concat", std::move(out), ids, [&tape, ids, axis](const Matrix& g, std::vector<Matrix>& grads) {
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const Matrix& v = tape.value(id);
      if (tape.requires_grad(id)) {
        Matrix& slot = grad_slot(grads, tape, id);
        for (std::size_t r = 0; r < v.rows(); ++r)
          for (std::size_t c = 0; c < v.cols(); ++c)
            slot(r, c) += axis == 0 ? g(offset + r, c) : g(r, offset + c);
      }
      offset += axis == 0 ? v.rows() : v.cols();
    }
  });
}

Tensor row_l2_normalize(const Tensor& a) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  Matrix out(av.rows(), av.cols());
  std::vector<double> norms(av.rows());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double n2 = 0.0;
    for (double v : av.row_span(r)) n2 += v * v;
    const double n = std::sqrt(n2);
    if (n < 1e-12) throw NumericError("row_l2_normalize: row " + std::to_string(r) + " has norm below 1e-12");
    norms[r] = n;
    for (std::size_t c = 0; c < av.cols(); ++c) out(r, c) = av(r, c) / n;
  }
  const std::size_t ia = a.id();
  const std::size_t out_id = tape.size();
  return tape.record("row_l2_normalize", std::move(out), {ia},
                     [&tape, ia, out_id, norms = std::move(norms)](const Matrix& g, std::vector<Matrix>& grads) {
                       const Matrix& y = tape.value(out_id);
                       Matrix& slot = grad_slot(grads, tape, ia);
                       for (std::size_t r = 0; r < y.rows(); ++r) {
                         double dot = 0.0;
                         for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
                         for (std::size_t c = 0; c < y.cols(); ++c) slot(r, c) += (g(r, c) - dot * y(r, c)) / norms[r];
                       }
                     });
}

Tensor select_rows(const Tensor& a, std::span<const std::size_t> indices) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  Matrix out(indices.size(), av.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= av.rows()) {
      throw DimensionError("select_rows: index " + std::to_string(indices[i]) + " out of range for " + av.shape_string());
    }
    std::copy_n(av.row_span(indices[i]).begin(), av.cols(), out.row_span(i).begin());
  }
  const std::size_t ia = a.id();
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return tape.record("select_rows", std::move(out), {ia}, [&tape, ia, idx = std::move(idx)](const Matrix& g, std::vector<Matrix>& grads) {
    Matrix& slot = grad_slot(grads, tape, ia);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t c = 0; c < g.cols(); ++c) slot(idx[i], c) += g(i, c);
  });
}

Tensor reshape(const Tensor& a, std::size_t rows, std::size_t cols) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  if (rows * cols != av.size()) {
    throw DimensionError("reshape: cannot view " + av.shape_string() + " as " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  const std::size_t ia = a.id();
  return tape.record("reshape", Matrix(rows, cols, av.data()), {ia}, [&tape, ia](const Matrix& g, std::vector<Matrix>& grads) {
    Matrix& slot = grad_slot(grads, tape, ia);
    for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i];
  });
}

Tensor neighbor_sum(const Tensor& a, const Adjacency& adjacency) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  if (adjacency.num_nodes() != av.rows()) {
    throw DimensionError("neighbor_sum: adjacency has " + std::to_string(adjacency.num_nodes()) + " nodes, input " + av.shape_string());
  }
  Matrix out(av.rows(), av.cols());
  for (std::size_t v = 0; v < av.rows(); ++v) {
    auto o = out.row_span(v);
    for (std::size_t e = adjacency.offsets[v]; e < adjacency.offsets[v + 1]; ++e) {
      auto in = av.row_span(adjacency.neighbors[e]);
      for (std::size_t c = 0; c < o.size(); ++c) o[c] += in[c];
    }
  }
  const std::size_t ia = a.id();
  // The neighbor relation is symmetric, so the adjoint is the same sum.
  return tape.record("neighbor_sum", std::move(out), {ia}, [&tape, ia, adjacency](const Matrix& g, std::vector<Matrix>& grads) {
    Matrix& slot = grad_slot(grads, tape, ia);
    for (std::size_t v = 0; v < g.rows(); ++v) {
      auto gv = g.row_span(v);
      for (std::size_t e = adjacency.offsets[v]; e < adjacency.offsets[v + 1]; ++e) {
        auto s = slot.row_span(adjacency.neighbors[e]);
        for (std::size_t c = 0; c < gv.size(); ++c) s[c] += gv[c];
      }
    }
  });
}

Tensor segment_sum(const Tensor& a, const SegmentBounds& segments) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  check_segments("segment_sum", segments, av.rows());
  const std::size_t nseg = segments.size() - 1;
  Matrix out(nseg, av.cols());
  for (std::size_t s = 0; s < nseg; ++s)
    for (std::size_t r = segments[s]; r < segments[s + 1]; ++r)
      for (std::size_t c = 0; c < av.cols(); ++c) out(s, c) += av(r, c);
  const std::size_t ia = a.id();
  return tape.record("segment_sum", std::move(out), {ia}, [&tape, ia, segments](const Matrix& g, std::vector<Matrix>& grads) {
    Matrix& slot = grad_slot(grads, tape, ia);
    for (std::size_t s = 0; s + 1 < segments.size(); ++s)
      for (std::size_t r = segments[s]; r < segments[s + 1]; ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) slot(r, c) += g(s, c);
  });
}

Tensor segment_weighted_sum(const Tensor& weights, const Tensor& values, const SegmentBounds& segments) {
  Tape& tape = same_tape(weights, values, "segment_weighted_sum");
  const Matrix& w = weights.value();
  const Matrix& v = values.value();
  if (w.rows() != v.rows()) shape_error("segment_weighted_sum", w, v);
  check_segments("segment_weighted_sum", segments, w.rows());
  const std::size_t nseg = segments.size() - 1;
  const std::size_t p = w.cols(), d = v.cols();
  Matrix out(nseg * p, d);
  for (std::size_t s = 0; s < nseg; ++s)
    for (std::size_t r = segments[s]; r < segments[s + 1]; ++r)
      for (std::size_t k = 0; k < p; ++k) {
        const double wk = w(r, k);
        auto o = out.row_span(s * p + k);
        auto in = v.row_span(r);
        for (std::size_t c = 0; c < d; ++c) o[c] += wk * in[c];
      }
  const std::size_t iw = weights.id(), iv = values.id();
  return tape.record("segment_weighted_sum", std::move(out), {iw, iv},
                     [&tape, iw, iv, segments](const Matrix& g, std::vector<Matrix>& grads) {
                       const Matrix& w = tape.value(iw);
                       const Matrix& v = tape.value(iv);
                       const std::size_t p = w.cols(), d = v.cols();
                       const bool gw = tape.requires_grad(iw), gv = tape.requires_grad(iv);
                       Matrix* sw = gw ? &grad_slot(grads, tape, iw) : nullptr;
                       Matrix* sv = gv ? &grad_slot(grads, tape, iv) : nullptr;
                       for (std::size_t s = 0; s + 1 < segments.size(); ++s)
                         for (std::size_t r = segments[s]; r < segments[s + 1]; ++r)
                           for (std::size_t k = 0; k < p; ++k) {
                             auto go = g.row_span(s * p + k);
                             if (gw) {
                               double dot = 0.0;
                               for (std::size_t c = 0; c < d; ++c) dot += go[c] * v(r, c);
                               (*sw)(r, k) += dot;
                             }
                             if (gv) {
                               const double wk = w(r, k);
                               for (std::size_t c = 0; c < d; ++c) (*sv)(r, c) += wk * go[c];
                             }
                           }
                     });
}

Tensor detach(const Tensor& t) { return t.tape().constant(t.value()); }

}  // namespace groupcl
