//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_MODEL_NN_H_
#define SEMIRETRO_MODEL_NN_H_

#include <random>
#include <string>
#include <vector>

#include "semiretro/tensor/optim.h"
#include "semiretro/tensor/tensor.h"

namespace semiretro::model {

// x W + b with Glorot-initialized W and zero b, registered as
// "<name>.w" and "<name>.b".
class Linear {
public:
  Linear() = default;
  Linear(tensor::ParameterStore &store, const std::string &name, int in, int out,
         std::mt19937_64 &rng);

  tensor::Tensor operator()(const tensor::Tensor &x) const;

  int in() const { return w_.rows(); }
  int out() const { return w_.cols(); }
  const tensor::Tensor &weight() const { return w_; }
  const tensor::Tensor &bias() const { return b_; }

private:
  tensor::Tensor w_;
  tensor::Tensor b_;
};

// Linear layers of the given widths with ReLU between them (none after the
// last).
class Mlp {
public:
  Mlp() = default;
  Mlp(tensor::ParameterStore &store, const std::string &name, const std::vector<int> &widths,
      std::mt19937_64 &rng);

  tensor::Tensor operator()(const tensor::Tensor &x) const;

  int in() const { return layers_.front().in(); }
  int out() const { return layers_.back().out(); }
  const std::vector<Linear> &layers() const { return layers_; }

private:
  std::vector<Linear> layers_;
};

}  // namespace semiretro::model

#endif  // SEMIRETRO_MODEL_NN_H_
