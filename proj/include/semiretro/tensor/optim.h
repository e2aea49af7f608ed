//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_TENSOR_OPTIM_H_
#define SEMIRETRO_TENSOR_OPTIM_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "semiretro/tensor/tensor.h"

namespace semiretro::tensor {

// Named trainable leaves in registration order. Tensors are handles, so the
// returned copies alias the stored parameter.
class ParameterStore {
public:
  Tensor add(const std::string &name, Matrix init);
  Tensor get(const std::string &name) const;
  bool contains(const std::string &name) const { return index_.count(name) > 0; }

  std::size_t size() const { return params_.size(); }
  const std::string &name(std::size_t i) const { return names_[i]; }
  const Tensor &at(std::size_t i) const { return params_[i]; }
  std::size_t num_scalars() const;

  void zero_grad();

private:
  std::vector<std::string> names_;
  std::vector<Tensor> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Glorot-uniform fan_in x fan_out weights.
Matrix glorot(int fan_in, int fan_out, std::mt19937_64 &rng);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Parameters that received no gradient this step
// are updated as if their gradient were zero.
class Adam {
public:
  explicit Adam(ParameterStore &params, AdamOptions options = {});

  void step(double lr);
  std::int64_t steps() const { return step_; }
  const AdamOptions &options() const { return options_; }

  const std::vector<Matrix> &first_moments() const { return m_; }
  const std::vector<Matrix> &second_moments() const { return v_; }
  // Restores moments and step counter; shapes must match the store.
  void restore(std::int64_t step, std::vector<Matrix> m, std::vector<Matrix> v);

private:
  ParameterStore *params_;
  AdamOptions options_;
  std::int64_t step_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

// Warm up from max_lr / div_factor to max_lr over the first pct_start of the
// steps, then cosine-anneal to max_lr / (div_factor * final_div_factor).
struct OneCycleSchedule {
  double max_lr = 1e-3;
  std::int64_t total_steps = 1;
  double pct_start = 0.3;
  double div_factor = 25.0;
  double final_div_factor = 1e4;

  double lr(std::int64_t step) const;
  // Last step of the warmup phase.
  std::int64_t warmup_end() const;
};

class CheckpointError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Binary checkpoint: magic, format version, then per parameter its name,
// shape and raw f64 values; optionally the Adam state. Reload is bit-exact.
void save_checkpoint(const std::string &path, const ParameterStore &params,
                     const Adam *adam = nullptr);
// Parameters must already be registered with matching names and shapes.
// Optimizer state is restored when both the file and `adam` carry it.
void load_checkpoint(const std::string &path, ParameterStore &params,
                     Adam *adam = nullptr);

}  // namespace semiretro::tensor

#endif  // SEMIRETRO_TENSOR_OPTIM_H_
