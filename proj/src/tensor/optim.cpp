//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/tensor/optim.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace semiretro::tensor {

Tensor ParameterStore::add(const std::string &name, Matrix init) {
  if (index_.count(name))
    throw std::invalid_argument("parameter registered twice: " + name);
  index_[name] = params_.size();
  names_.push_back(name);
  params_.emplace_back(std::move(init), true);
  return params_.back();
}

Tensor ParameterStore::get(const std::string &name) const {
  const auto it = index_.find(name);
  if (it == index_.end())
    throw std::out_of_range("unknown parameter: " + name);
  return params_[it->second];
}

std::size_t ParameterStore::num_scalars() const {
  std::size_t n = 0;
  for (const Tensor &p: params_)
    n += static_cast<std::size_t>(p.value().size());
  return n;
}

void ParameterStore::zero_grad() {
  for (Tensor &p: params_)
    p.zero_grad();
}

Matrix glorot(int fan_in, int fan_out, std::mt19937_64 &rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  Matrix w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w.data()[i] = (2.0 * uniform01(rng) - 1.0) * bound;
  return w;
}

Adam::Adam(ParameterStore &params, AdamOptions options)
    : params_(&params), options_(options) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix &p = params.at(i).value();
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void Adam::step(double lr) {
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params_->size(); ++i) {
    Tensor p = params_->at(i);
    double *w = p.mutable_value().data();
    double *m = m_[i].data();
    double *v = v_[i].data();
    const Eigen::Index n = m_[i].size();
    const double *g = p.has_grad() ? p.node()->grad.data() : nullptr;
    // One fused pass; a missing gradient counts as zero.
    for (Eigen::Index j = 0; j < n; ++j) {
      const double gj = g ? g[j] : 0.0;
      m[j] = b1 * m[j] + (1.0 - b1) * gj;
      v[j] = b2 * v[j] + (1.0 - b2) * gj * gj;
      w[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + options_.eps);
    }
  }
}

void Adam::restore(std::int64_t step, std::vector<Matrix> m, std::vector<Matrix> v) {
  if (m.size() != m_.size() || v.size() != v_.size())
    throw CheckpointError("optimizer state size mismatch");
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].rows() != m_[i].rows() || m[i].cols() != m_[i].cols()
        || v[i].rows() != v_[i].rows() || v[i].cols() != v_[i].cols())
      throw CheckpointError("optimizer state shape mismatch for " + params_->name(i));
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

std::int64_t OneCycleSchedule::warmup_end() const {
  const auto end = static_cast<std::int64_t>(pct_start * static_cast<double>(total_steps)) - 1;
  return std::max<std::int64_t>(end, 0);
}

double OneCycleSchedule::lr(std::int64_t step) const {
  const double initial = max_lr / div_factor;
  const double floor = initial / final_div_factor;
  auto anneal = [](double start, double end, double pct) {
    return end + (start - end) / 2.0 * (std::cos(std::numbers::pi * pct) + 1.0);
  };
  const std::int64_t up = warmup_end();
  const std::int64_t last = std::max<std::int64_t>(total_steps - 1, up + 1);
  step = std::clamp<std::int64_t>(step, 0, last);
  if (step <= up) {
    if (up == 0)
      return max_lr;
    return anneal(initial, max_lr, static_cast<double>(step) / static_cast<double>(up));
  }
  return anneal(max_lr, floor,
                static_cast<double>(step - up) / static_cast<double>(last - up));
}

// ---- checkpoint ----------------------------------------------------------

namespace {

constexpr char kMagic[8] = { 'S', 'R', 'C', 'K', 'P', 'T', '\0', '\n' };
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <class T>
T take(std::istream &is) {
  T v {};
  is.read(reinterpret_cast<char *>(&v), sizeof v);
  if (!is)
    throw CheckpointError("checkpoint truncated");
  return v;
}

void put_matrix(std::ostream &os, const Matrix &m) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
  os.write(reinterpret_cast<const char *>(m.data()),
           static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix take_matrix(std::istream &is) {
  const auto r = take<std::uint32_t>(is);
  const auto c = take<std::uint32_t>(is);
  Matrix m(r, c);
  is.read(reinterpret_cast<char *>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!is)
    throw CheckpointError("checkpoint truncated");
  return m;
}

}  // namespace

void save_checkpoint(const std::string &path, const ParameterStore &params,
                     const Adam *adam) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw CheckpointError("cannot write checkpoint " + path);
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string &name = params.name(i);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_matrix(os, params.at(i).value());
  }
  put<std::uint8_t>(os, adam ? 1 : 0);
  if (adam) {
    put<std::int64_t>(os, adam->steps());
    for (std::size_t i = 0; i < params.size(); ++i) {
      put_matrix(os, adam->first_moments()[i]);
      put_matrix(os, adam->second_moments()[i]);
    }
  }
  if (!os)
    throw CheckpointError("failed writing checkpoint " + path);
}

void load_checkpoint(const std::string &path, ParameterStore &params, Adam *adam) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw CheckpointError("cannot read checkpoint " + path);
  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw CheckpointError(path + " is not a checkpoint");
  const auto version = take<std::uint32_t>(is);
  if (version != kVersion)
    throw CheckpointError("checkpoint version " + std::to_string(version)
                          + " unsupported (expected " + std::to_string(kVersion) + ")");
  const auto count = take<std::uint32_t>(is);
  if (count != params.size())
    throw CheckpointError("checkpoint has " + std::to_string(count) + " parameters, model has "
                          + std::to_string(params.size()));
  std::vector<Matrix> values;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = take<std::uint32_t>(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    if (!is)
      throw CheckpointError("checkpoint truncated");
    if (name != params.name(i))
      throw CheckpointError("checkpoint parameter " + name + " where model expects "
                            + params.name(i));
    Matrix m = take_matrix(is);
    const Matrix &cur = params.at(i).value();
    if (m.rows() != cur.rows() || m.cols() != cur.cols())
      throw CheckpointError("shape mismatch for parameter " + name);
    values.push_back(std::move(m));
  }
  const bool has_adam = take<std::uint8_t>(is) != 0;
  if (has_adam && adam) {
    const auto step = take<std::int64_t>(is);
    std::vector<Matrix> m, v;
    for (std::uint32_t i = 0; i < count; ++i) {
      m.push_back(take_matrix(is));
      v.push_back(take_matrix(is));
    }
    adam->restore(step, std::move(m), std::move(v));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor p = params.at(i);
    p.mutable_value() = std::move(values[i]);
  }
}

}  // namespace semiretro::tensor
