//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_TENSOR_TENSOR_H_
#define SEMIRETRO_TENSOR_TENSOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace semiretro::tensor {

// All values are f64 matrices; a vector is a 1-row or 1-column matrix and a
// scalar is 1x1.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ShapeError: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class Tape;

namespace detail {

struct Node {
  Matrix value;
  Matrix grad;  // empty until the first accumulation
  bool requires_grad = false;
  // Propagates this node's grad into its inputs. Empty for leaves.
  std::function<void(Node &)> backward;

  void accumulate(const Matrix &g);
};

}  // namespace detail

class Tensor {
public:
  Tensor();
  explicit Tensor(Matrix value, bool requires_grad = false);

  static Tensor zeros(int rows, int cols, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor from_rows(std::span<const std::vector<double>> rows);

  int rows() const { return static_cast<int>(node_->value.rows()); }
  int cols() const { return static_cast<int>(node_->value.cols()); }
  std::string shape_string() const;

  const Matrix &value() const { return node_->value; }
  // Writes through to the stored value; only meaningful for leaves.
  Matrix &mutable_value() { return node_->value; }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->grad.size() > 0; }
  // Zero matrix of the value's shape when no gradient has arrived.
  Matrix grad() const;
  void zero_grad() { node_->grad.resize(0, 0); }

  // Identity of the underlying node, used by the tape and optimizers.
  detail::Node *node() const { return node_.get(); }

private:
  friend class Tape;
  friend Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                            std::function<void(detail::Node &)> backward);
  std::shared_ptr<detail::Node> node_;
};

// Records differentiable operations in creation order, which is a topological
// order. Operations only record while a tape is active on this thread; with
// no tape, results are constants.
class Tape {
public:
  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  // Reverse sweep seeded with d loss / d loss = 1. Throws if the loss is not
  // 1x1 or if the tape was already swept since the last reset().
  void backward(const Tensor &loss);
  void reset();

  std::size_t size() const { return nodes_.size(); }

  static Tape *active();

private:
  friend class TapeScope;
  friend Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                            std::function<void(detail::Node &)> backward);
  std::vector<std::shared_ptr<detail::Node>> nodes_;
  bool swept_ = false;
};

// Makes `tape` the active tape for the current thread until destruction.
class TapeScope {
public:
  explicit TapeScope(Tape &tape);
  ~TapeScope();
  TapeScope(const TapeScope &) = delete;
  TapeScope &operator=(const TapeScope &) = delete;

private:
  Tape *previous_;
};

// Builds an op result; records it when a tape is active and any input needs
// a gradient.
Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                   std::function<void(detail::Node &)> backward);

// Portable uniform doubles from a 64-bit engine.
double uniform01(std::mt19937_64 &rng);

// ---- operations ----------------------------------------------------------

Tensor matmul(const Tensor &a, const Tensor &b);
Tensor transpose(const Tensor &a);
Tensor add(const Tensor &a, const Tensor &b);
Tensor sub(const Tensor &a, const Tensor &b);
Tensor mul(const Tensor &a, const Tensor &b);  // elementwise
Tensor scale(const Tensor &a, double s);
// a (n x d) plus row vector b (1 x d) on every row.
Tensor add_row(const Tensor &a, const Tensor &bias);

Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_cols(const Tensor &a, int begin, int end);
Tensor slice_rows(const Tensor &a, int begin, int end);
// Row i of the result is row index[i] of a.
Tensor gather_rows(const Tensor &a, std::span<const int> index);
// Row s of the result is the sum of rows r with segment[r] == s.
Tensor segment_sum(const Tensor &a, std::span<const int> segment, int num_segments);
// Row s of the result is the mean of rows with segment[r] == s (zero row
// for empty segments).
Tensor mean_pool(const Tensor &a, std::span<const int> segment, int num_segments);
// Mean over all rows, 1 x d.
Tensor mean_rows(const Tensor &a);
Tensor sum(const Tensor &a);  // 1x1
Tensor mean(const Tensor &a);  // 1x1

Tensor relu(const Tensor &a);
Tensor leaky_relu(const Tensor &a, double slope = 0.2);
Tensor sigmoid(const Tensor &a);
Tensor log(const Tensor &a);
// Row-wise softmax.
Tensor softmax(const Tensor &a);
Tensor log_softmax(const Tensor &a);
// Softmax of each column over the rows sharing a segment id.
Tensor segment_softmax(const Tensor &a, std::span<const int> segment, int num_segments);
// a is n x (heads*d), w is n x heads; column block h of row i is scaled by
// w(i, h).
Tensor mul_heads(const Tensor &a, const Tensor &w);
// Per-row, per-head dot products of two n x (heads*d) matrices: n x heads.
Tensor dot_heads(const Tensor &a, const Tensor &b, int heads);

// Inverted dropout; identity when !train or rate == 0.
Tensor dropout(const Tensor &a, double rate, bool train, std::mt19937_64 &rng);

// Sum over rows of -log softmax(logits)[row, target[row]].
Tensor cross_entropy(const Tensor &logits, std::span<const int> target);
// Sum of binary cross-entropies between sigmoid(logits) and 0/1 targets,
// evaluated stably from logits.
Tensor bce_with_logits(const Tensor &logits, const Matrix &target);

}  // namespace semiretro::tensor

#endif  // SEMIRETRO_TENSOR_TENSOR_H_
