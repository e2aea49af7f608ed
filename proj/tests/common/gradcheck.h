//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_TESTS_GRADCHECK_H_
#define SEMIRETRO_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "semiretro/tensor/optim.h"
#include "semiretro/tensor/tensor.h"

namespace semiretro::testing {

// Normwise relative error ||a - n|| / max(||a|| + ||n||, 1e-12) between the
// tape gradient and central differences of a scalar function, worst case
// over all inputs. The function must rebuild its graph from `inputs` on every
// call.
inline double gradcheck(const std::function<tensor::Tensor(std::vector<tensor::Tensor> &)> &f,
                        std::vector<tensor::Tensor> inputs, double h = 1e-6) {
  using tensor::Matrix;
  for (auto &t: inputs) {
    t = tensor::Tensor(t.value(), true);
  }
  {
    tensor::Tape tape;
    tensor::TapeScope scope(tape);
    tensor::Tensor loss = f(inputs);
    tape.backward(loss);
  }
  double worst = 0.0;
  for (auto &t: inputs) {
    const Matrix analytic = t.grad();
    Matrix numeric(analytic.rows(), analytic.cols());
    for (Eigen::Index i = 0; i < numeric.size(); ++i) {
      double &x = t.mutable_value().data()[i];
      const double saved = x;
      x = saved + h;
      const double up = f(inputs).item();
      x = saved - h;
      const double down = f(inputs).item();
      x = saved;
      numeric.data()[i] = (up - down) / (2 * h);
    }
    const double denom = std::max(analytic.norm() + numeric.norm(), 1e-12);
    worst = std::max(worst, (analytic - numeric).norm() / denom);
  }
  return worst;
}

// The same measure against every parameter of `store`, pooled over at most
// `per_param` randomly chosen entries of each. `f` builds a scalar loss.
inline double param_gradcheck(tensor::ParameterStore &store,
                              const std::function<tensor::Tensor()> &f, std::mt19937_64 &rng,
                              int per_param = 3, double h = 1e-6) {
  store.zero_grad();
  {
    tensor::Tape tape;
    tensor::TapeScope scope(tape);
    tensor::Tensor loss = f();
    tape.backward(loss);
  }
  std::vector<double> analytic, numeric;
  for (std::size_t i = 0; i < store.size(); ++i) {
    tensor::Tensor p = store.at(i);
    const tensor::Matrix g = p.has_grad() ? p.grad()
                                          : tensor::Matrix::Zero(p.value().rows(), p.value().cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, p.value().size() - 1);
    for (int s = 0; s < per_param; ++s) {
      const Eigen::Index j = pick(rng);
      double &x = p.mutable_value().data()[j];
      const double saved = x;
      x = saved + h;
      const double up = f().item();
      x = saved - h;
      const double down = f().item();
      x = saved;
      analytic.push_back(g.data()[j]);
      numeric.push_back((up - down) / (2 * h));
    }
  }
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(na) + std::sqrt(nn), 1e-12);
}

// Zeroes every parameter whose name starts with `prefix`.
inline void zero_params(tensor::ParameterStore &store, const std::string &prefix) {
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (store.name(i).rfind(prefix, 0) == 0) {
      tensor::Tensor p = store.at(i);
      p.mutable_value().setZero();
    }
  }
}

inline tensor::Matrix random_matrix(int rows, int cols, std::mt19937_64 &rng,
                                    double scale = 1.0) {
  tensor::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = scale * (2.0 * tensor::uniform01(rng) - 1.0);
  return m;
}

}  // namespace semiretro::testing

#endif  // SEMIRETRO_TESTS_GRADCHECK_H_
