//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/tensor/tensor.h"

#include <cmath>
#include <limits>
#include <sstream>

namespace semiretro::tensor {

namespace {

thread_local Tape *g_active_tape = nullptr;

void require(bool ok, const char *op, const std::string &detail) {
  if (!ok)
    throw ShapeError(std::string(op) + ": " + detail);
}

std::string dims(const Tensor &t) { return t.shape_string(); }

void accumulate_into(const Tensor &t, const Matrix &g) {
  if (t.requires_grad())
    t.node()->accumulate(g);
}

void check_segments(std::span<const int> segment, int rows, int num_segments,
                    const char *op) {
  require(static_cast<int>(segment.size()) == rows, op, "segment length != rows");
  for (int s: segment)
    require(s >= 0 && s < num_segments, op, "segment id out of range");
}

}  // namespace

void detail::Node::accumulate(const Matrix &g) {
  if (grad.size() == 0)
    grad = g;
  else
    grad += g;
}

Tensor::Tensor(): node_(std::make_shared<detail::Node>()) { }

Tensor::Tensor(Matrix value, bool requires_grad)
    : node_(std::make_shared<detail::Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
  return Tensor(Matrix::Zero(rows, cols), requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return Tensor(std::move(m), requires_grad);
}

Tensor Tensor::from_rows(std::span<const std::vector<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows[0].size()) : 0;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    require(static_cast<int>(rows[i].size()) == c, "from_rows", "ragged rows");
    for (int j = 0; j < c; ++j)
      m(i, j) = rows[i][j];
  }
  return Tensor(std::move(m));
}

std::string Tensor::shape_string() const {
  std::ostringstream os;
  os << "(" << rows() << "," << cols() << ")";
  return os.str();
}

double Tensor::item() const {
  require(rows() == 1 && cols() == 1, "item", "tensor is " + shape_string());
  return node_->value(0, 0);
}

Matrix Tensor::grad() const {
  if (has_grad())
    return node_->grad;
  return Matrix::Zero(rows(), cols());
}

Tape *Tape::active() { return g_active_tape; }

void Tape::backward(const Tensor &loss) {
  if (swept_)
    throw std::logic_error("backward: tape already swept; call reset() first");
  require(loss.rows() == 1 && loss.cols() == 1, "backward",
          "loss must be scalar, got " + loss.shape_string());
  swept_ = true;
  if (!loss.requires_grad())
    return;
  loss.node()->accumulate(Matrix::Ones(1, 1));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    detail::Node &n = **it;
    if (n.backward && n.grad.size() > 0)
      n.backward(n);
  }
}

void Tape::reset() {
  nodes_.clear();
  swept_ = false;
}

TapeScope::TapeScope(Tape &tape): previous_(g_active_tape) {
  g_active_tape = &tape;
}

TapeScope::~TapeScope() { g_active_tape = previous_; }

Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                   std::function<void(detail::Node &)> backward) {
  Tensor out(std::move(value));
  Tape *tape = g_active_tape;
  if (!tape)
    return out;
  bool needs = false;
  for (const Tensor &t: inputs)
    needs = needs || t.requires_grad();
  if (!needs)
    return out;
  out.node_->requires_grad = true;
  out.node_->backward = std::move(backward);
  tape->nodes_.push_back(out.node_);
  return out;
}

double uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---- linear algebra ------------------------------------------------------

Tensor matmul(const Tensor &a, const Tensor &b) {
  require(a.cols() == b.rows(), "matmul", dims(a) + " x " + dims(b));
  Matrix v = a.value() * b.value();
  return make_result(std::move(v), { a, b }, [a, b](detail::Node &self) {
    if (a.requires_grad())
      a.node()->accumulate(self.grad * b.value().transpose());
    if (b.requires_grad())
      b.node()->accumulate(a.value().transpose() * self.grad);
  });
}

Tensor transpose(const Tensor &a) {
  Matrix v = a.value().transpose();
  return make_result(std::move(v), { a }, [a](detail::Node &self) {
    accumulate_into(a, self.grad.transpose());
  });
}

Tensor add(const Tensor &a, const Tensor &b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add", dims(a) + " + " + dims(b));
  return make_result(a.value() + b.value(), { a, b }, [a, b](detail::Node &self) {
    accumulate_into(a, self.grad);
    accumulate_into(b, self.grad);
  });
}

Tensor sub(const Tensor &a, const Tensor &b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub", dims(a) + " - " + dims(b));
  return make_result(a.value() - b.value(), { a, b }, [a, b](detail::Node &self) {
    accumulate_into(a, self.grad);
    accumulate_into(b, -self.grad);
  });
}

Tensor mul(const Tensor &a, const Tensor &b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "mul", dims(a) + " * " + dims(b));
  Matrix v = a.value().cwiseProduct(b.value());
  return make_result(std::move(v), { a, b }, [a, b](detail::Node &self) {
    accumulate_into(a, self.grad.cwiseProduct(b.value()));
    accumulate_into(b, self.grad.cwiseProduct(a.value()));
  });
}

Tensor scale(const Tensor &a, double s) {
  return make_result(a.value() * s, { a }, [a, s](detail::Node &self) {
    accumulate_into(a, self.grad * s);
  });
}

Tensor add_row(const Tensor &a, const Tensor &bias) {
  require(bias.rows() == 1 && bias.cols() == a.cols(), "add_row",
          dims(a) + " + row " + dims(bias));
  Matrix v = a.value().rowwise() + bias.value().row(0);
  return make_result(std::move(v), { a, bias }, [a, bias](detail::Node &self) {
    accumulate_into(a, self.grad);
    if (bias.requires_grad())
      bias.node()->accumulate(self.grad.colwise().sum());
  });
}

// ---- shape ---------------------------------------------------------------

Tensor concat_cols(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat_cols", "no inputs");
  const int rows = parts[0].rows();
  int cols = 0;
  for (const Tensor &p: parts) {
    require(p.rows() == rows, "concat_cols", "row mismatch " + dims(p));
    cols += p.cols();
  }
  Matrix v(rows, cols);
  std::vector<int> offsets;
  int at = 0;
  for (const Tensor &p: parts) {
    offsets.push_back(at);
    v.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return make_result(std::move(v), inputs, [inputs, offsets](detail::Node &self) {
    for (std::size_t i = 0; i < inputs.size(); ++i)
      accumulate_into(inputs[i], self.grad.middleCols(offsets[i], inputs[i].cols()));
  });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat_rows", "no inputs");
  const int cols = parts[0].cols();
  int rows = 0;
  for (const Tensor &p: parts) {
    require(p.cols() == cols, "concat_rows", "column mismatch " + dims(p));
    rows += p.rows();
  }
  Matrix v(rows, cols);
  std::vector<int> offsets;
  int at = 0;
  for (const Tensor &p: parts) {
    offsets.push_back(at);
    v.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return make_result(std::move(v), inputs, [inputs, offsets](detail::Node &self) {
    for (std::size_t i = 0; i < inputs.size(); ++i)
      accumulate_into(inputs[i], self.grad.middleRows(offsets[i], inputs[i].rows()));
  });
}

Tensor slice_cols(const Tensor &a, int begin, int end) {
  require(0 <= begin && begin <= end && end <= a.cols(), "slice_cols", "bad range");
  Matrix v = a.value().middleCols(begin, end - begin);
  return make_result(std::move(v), { a }, [a, begin, end](detail::Node &self) {
    if (!a.requires_grad())
      return;
    Matrix g = Matrix::Zero(a.rows(), a.cols());
    g.middleCols(begin, end - begin) = self.grad;
    a.node()->accumulate(g);
  });
}

Tensor slice_rows(const Tensor &a, int begin, int end) {
  require(0 <= begin && begin <= end && end <= a.rows(), "slice_rows", "bad range");
  Matrix v = a.value().middleRows(begin, end - begin);
  return make_result(std::move(v), { a }, [a, begin, end](detail::Node &self) {
    if (!a.requires_grad())
      return;
    Matrix g = Matrix::Zero(a.rows(), a.cols());
    g.middleRows(begin, end - begin) = self.grad;
    a.node()->accumulate(g);
  });
}

Tensor gather_rows(const Tensor &a, std::span<const int> index) {
  Matrix v(index.size(), a.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    require(index[i] >= 0 && index[i] < a.rows(), "gather_rows", "index out of range");
    v.row(i) = a.value().row(index[i]);
  }
  std::vector<int> idx(index.begin(), index.end());
  return make_result(std::move(v), { a }, [a, idx](detail::Node &self) {
    if (!a.requires_grad())
      return;
    Matrix g = Matrix::Zero(a.rows(), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
      g.row(idx[i]) += self.grad.row(i);
    a.node()->accumulate(g);
  });
}

Tensor segment_sum(const Tensor &a, std::span<const int> segment, int num_segments) {
  check_segments(segment, a.rows(), num_segments, "segment_sum");
  Matrix v = Matrix::Zero(num_segments, a.cols());
  for (int r = 0; r < a.rows(); ++r)
    v.row(segment[r]) += a.value().row(r);
  std::vector<int> seg(segment.begin(), segment.end());
  return make_result(std::move(v), { a }, [a, seg](detail::Node &self) {
    if (!a.requires_grad())
      return;
    Matrix g(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
      g.row(r) = self.grad.row(seg[r]);
    a.node()->accumulate(g);
  });
}

Tensor mean_pool(const Tensor &a, std::span<const int> segment, int num_segments) {
  check_segments(segment, a.rows(), num_segments, "mean_pool");
  std::vector<double> count(num_segments, 0.0);
  for (int s: segment)
    count[s] += 1.0;
  Matrix v = Matrix::Zero(num_segments, a.cols());
  for (int r = 0; r < a.rows(); ++r)
    v.row(segment[r]) += a.value().row(r) / count[segment[r]];
  std::vector<int> seg(segment.begin(), segment.end());
  return make_result(std::move(v), { a }, [a, seg, count](detail::Node &self) {
    if (!a.requires_grad())
      return;
    Matrix g(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
      g.row(r) = self.grad.row(seg[r]) / count[seg[r]];
    a.node()->accumulate(g);
  });
}

Tensor mean_rows(const Tensor &a) {
  require(a.rows() > 0, "mean_rows", "no rows");
  const double n = a.rows();
  Matrix v = a.value().colwise().sum() / n;
  return make_result(std::move(v), { a }, [a, n](detail::Node &self) {
    if (a.requires_grad())
      a.node()->accumulate(self.grad.replicate(a.rows(), 1) / n);
  });
}

Tensor sum(const Tensor &a) {
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  return make_result(std::move(v), { a }, [a](detail::Node &self) {
    if (a.requires_grad())
      a.node()->accumulate(Matrix::Constant(a.rows(), a.cols(), self.grad(0, 0)));
  });
}

Tensor mean(const Tensor &a) {
  require(a.value().size() > 0, "mean", "empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

// ---- elementwise ---------------------------------------------------------

Tensor relu(const Tensor &a) {
  Matrix v = a.value().cwiseMax(0.0);
  return make_result(std::move(v), { a }, [a](detail::Node &self) {
    if (a.requires_grad())
      a.node()->accumulate(
          (a.value().array() > 0.0).cast<double>().matrix().cwiseProduct(self.grad));
  });
}

Tensor leaky_relu(const Tensor &a, double slope) {
  Matrix v = a.value().unaryExpr([slope](double x) { return x > 0 ? x : slope * x; });
  return make_result(std::move(v), { a }, [a, slope](detail::Node &self) {
    if (!a.requires_grad())
      return;
    Matrix d = a.value().unaryExpr([slope](double x) { return x > 0 ? 1.0 : slope; });
    a.node()->accumulate(d.cwiseProduct(self.grad));
  });
}

Tensor sigmoid(const Tensor &a) {
  Matrix v = a.value().unaryExpr([](double x) {
    if (x >= 0)
      return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return make_result(v, { a }, [a, v](detail::Node &self) {
    if (!a.requires_grad())
      return;
    Matrix d = v.array() * (1.0 - v.array());
    a.node()->accumulate(d.cwiseProduct(self.grad));
  });
}

Tensor log(const Tensor &a) {
  Matrix v = a.value().array().log().matrix();
  return make_result(std::move(v), { a }, [a](detail::Node &self) {
    if (a.requires_grad())
      a.node()->accumulate(self.grad.cwiseQuotient(a.value()));
  });
}

namespace {

Matrix softmax_rows(const Matrix &x) {
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

}  // namespace

Tensor softmax(const Tensor &a) {
  Matrix y = softmax_rows(a.value());
  return make_result(y, { a }, [a, y](detail::Node &self) {
    if (!a.requires_grad())
      return;
    const Eigen::VectorXd dot = self.grad.cwiseProduct(y).rowwise().sum();
    Matrix g = self.grad.colwise() - dot;
    a.node()->accumulate(g.cwiseProduct(y));
  });
}

Tensor log_softmax(const Tensor &a) {
  const Matrix &x = a.value();
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    const double lse = m + std::log((x.row(r).array() - m).exp().sum());
    y.row(r) = x.row(r).array() - lse;
  }
  return make_result(y, { a }, [a, y](detail::Node &self) {
    if (!a.requires_grad())
      return;
    const Eigen::VectorXd total = self.grad.rowwise().sum();
    Matrix p = y.array().exp().matrix();
    Matrix g = self.grad - (p.array().colwise() * total.array()).matrix();
    a.node()->accumulate(g);
  });
}

Tensor segment_softmax(const Tensor &a, std::span<const int> segment, int num_segments) {
  check_segments(segment, a.rows(), num_segments, "segment_softmax");
  const Matrix &x = a.value();
  Matrix m = Matrix::Constant(num_segments, x.cols(), -std::numeric_limits<double>::infinity());
  for (int r = 0; r < x.rows(); ++r)
    m.row(segment[r]) = m.row(segment[r]).cwiseMax(x.row(r));
  Matrix y(x.rows(), x.cols());
  Matrix z = Matrix::Zero(num_segments, x.cols());
  for (int r = 0; r < x.rows(); ++r) {
    y.row(r) = (x.row(r) - m.row(segment[r])).array().exp().matrix();
    z.row(segment[r]) += y.row(r);
  }
  for (int r = 0; r < x.rows(); ++r)
    y.row(r) = y.row(r).cwiseQuotient(z.row(segment[r]));
  std::vector<int> seg(segment.begin(), segment.end());
  return make_result(y, { a }, [a, y, seg, num_segments](detail::Node &self) {
    if (!a.requires_grad())
      return;
    Matrix dot = Matrix::Zero(num_segments, y.cols());
    for (int r = 0; r < y.rows(); ++r)
      dot.row(seg[r]) += self.grad.row(r).cwiseProduct(y.row(r));
    Matrix g(y.rows(), y.cols());
    for (int r = 0; r < y.rows(); ++r)
      g.row(r) = y.row(r).cwiseProduct(self.grad.row(r) - dot.row(seg[r]));
    a.node()->accumulate(g);
  });
}

Tensor mul_heads(const Tensor &a, const Tensor &w) {
  require(a.rows() == w.rows() && w.cols() > 0 && a.cols() % w.cols() == 0, "mul_heads",
          dims(a) + " by heads " + dims(w));
  const int heads = w.cols();
  const int d = a.cols() / heads;
  Matrix v(a.rows(), a.cols());
  for (int h = 0; h < heads; ++h)
    v.middleCols(h * d, d) = a.value().middleCols(h * d, d).array().colwise()
                             * w.value().col(h).array();
  return make_result(std::move(v), { a, w }, [a, w, heads, d](detail::Node &self) {
    if (a.requires_grad()) {
      Matrix g(a.rows(), a.cols());
      for (int h = 0; h < heads; ++h)
        g.middleCols(h * d, d) = self.grad.middleCols(h * d, d).array().colwise()
                                 * w.value().col(h).array();
      a.node()->accumulate(g);
    }
    if (w.requires_grad()) {
      Matrix g(w.rows(), heads);
      for (int h = 0; h < heads; ++h)
        g.col(h) = self.grad.middleCols(h * d, d)
                       .cwiseProduct(a.value().middleCols(h * d, d))
                       .rowwise()
                       .sum();
      w.node()->accumulate(g);
    }
  });
}

Tensor dot_heads(const Tensor &a, const Tensor &b, int heads) {
  require(a.rows() == b.rows() && a.cols() == b.cols() && heads > 0
              && a.cols() % heads == 0,
          "dot_heads", dims(a) + " . " + dims(b));
  const int d = a.cols() / heads;
  Matrix v(a.rows(), heads);
  for (int h = 0; h < heads; ++h)
    v.col(h) = a.value().middleCols(h * d, d).cwiseProduct(b.value().middleCols(h * d, d))
                   .rowwise()
                   .sum();
  return make_result(std::move(v), { a, b }, [a, b, heads, d](detail::Node &self) {
    auto spread = [&](const Tensor &other) {
      Matrix g(other.rows(), other.cols());
      for (int h = 0; h < heads; ++h)
        g.middleCols(h * d, d) = other.value().middleCols(h * d, d).array().colwise()
                                 * self.grad.col(h).array();
      return g;
    };
    if (a.requires_grad())
      a.node()->accumulate(spread(b));
    if (b.requires_grad())
      b.node()->accumulate(spread(a));
  });
}

Tensor dropout(const Tensor &a, double rate, bool train, std::mt19937_64 &rng) {
  if (!train || rate <= 0.0)
    return a;
  require(rate < 1.0, "dropout", "rate must be < 1");
  Matrix mask(a.rows(), a.cols());
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = uniform01(rng) < rate ? 0.0 : keep;
  Matrix v = a.value().cwiseProduct(mask);
  return make_result(std::move(v), { a }, [a, mask](detail::Node &self) {
    accumulate_into(a, self.grad.cwiseProduct(mask));
  });
}

// ---- losses --------------------------------------------------------------

Tensor cross_entropy(const Tensor &logits, std::span<const int> target) {
  require(static_cast<int>(target.size()) == logits.rows(), "cross_entropy",
          "one target per row required");
  for (int t: target) {
    if (t < 0 || t >= logits.cols())
      throw std::out_of_range("cross_entropy: class index " + std::to_string(t)
                              + " outside [0, " + std::to_string(logits.cols()) + ")");
  }
  Matrix p = softmax_rows(logits.value());
  double loss = 0.0;
  const Matrix &x = logits.value();
  for (int r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    loss += m + std::log((x.row(r).array() - m).exp().sum()) - x(r, target[r]);
  }
  Matrix v(1, 1);
  v(0, 0) = loss;
  std::vector<int> tgt(target.begin(), target.end());
  return make_result(std::move(v), { logits }, [logits, p, tgt](detail::Node &self) {
    if (!logits.requires_grad())
      return;
    Matrix g = p;
    for (std::size_t r = 0; r < tgt.size(); ++r)
      g(r, tgt[r]) -= 1.0;
    logits.node()->accumulate(g * self.grad(0, 0));
  });
}

Tensor bce_with_logits(const Tensor &logits, const Matrix &target) {
  require(target.rows() == logits.rows() && target.cols() == logits.cols(),
          "bce_with_logits", "target shape mismatch");
  const Matrix &z = logits.value();
  double loss = 0.0;
  Matrix g(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double x = z.data()[i];
    const double t = target.data()[i];
    loss += std::max(x, 0.0) - x * t + std::log1p(std::exp(-std::abs(x)));
    const double s = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    g.data()[i] = s - t;
  }
  Matrix v(1, 1);
  v(0, 0) = loss;
  return make_result(std::move(v), { logits }, [logits, g](detail::Node &self) {
    accumulate_into(logits, g * self.grad(0, 0));
  });
}

}  // namespace semiretro::tensor
