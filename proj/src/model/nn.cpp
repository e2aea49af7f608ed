//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/model/nn.h"

#include <stdexcept>

namespace semiretro::model {

using tensor::Matrix;
using tensor::Tensor;

Linear::Linear(tensor::ParameterStore &store, const std::string &name, int in, int out,
               std::mt19937_64 &rng)
    : w_(store.add(name + ".w", tensor::glorot(in, out, rng))),
      b_(store.add(name + ".b", Matrix::Zero(1, out))) { }

Tensor Linear::operator()(const Tensor &x) const {
  return tensor::add_row(tensor::matmul(x, w_), b_);
}

Mlp::Mlp(tensor::ParameterStore &store, const std::string &name,
         const std::vector<int> &widths, std::mt19937_64 &rng) {
  if (widths.size() < 2)
    throw std::invalid_argument("Mlp needs at least input and output widths");
  for (std::size_t i = 0; i + 1 < widths.size(); ++i)
    layers_.emplace_back(store, name + "." + std::to_string(i), widths[i], widths[i + 1], rng);
}

Tensor Mlp::operator()(const Tensor &x) const {
  Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i](h);
    if (i + 1 < layers_.size())
      h = tensor::relu(h);
  }
  return h;
}

}  // namespace semiretro::model
