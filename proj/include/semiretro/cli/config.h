//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_CLI_CONFIG_H_
#define SEMIRETRO_CLI_CONFIG_H_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semiretro/model/center_model.h"
#include "semiretro/model/synthon_model.h"
#include "semiretro/pipeline/pipeline.h"
#include "semiretro/pipeline/train.h"

namespace semiretro::cli {

// Bad input from the user: missing files, invalid settings, unusable
// checkpoints. Maps to exit code 1.
class UserError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Every setting of a run. Keys are "section.name" in the INI file; empty path
// settings are derived from run.out_dir.
struct RunConfig {
  // [run]
  std::uint64_t seed = 7;
  std::string out_dir = "out";
  int repeat = 1;

  // [data]
  std::string dataset;
  std::string train;
  std::string val;
  std::string test;
  std::string library;
  std::string ci_model;
  std::string sc_model;

  // [split] normalized to sum 1
  std::array<double, 3> ratios { 0.8, 0.1, 0.1 };

  // [templates]
  int k = 150;

  // [model]
  int width = 256;
  int layers = 6;
  int heads = 4;
  double dropout = 0.0;
  int hidden = 256;
  int class_embedding = 64;
  int transformer_layers = 2;
  int transformer_heads = 4;

  // [train]
  double ci_lr = 1e-3;
  double sc_lr = 1e-4;
  int batch = 128;
  int ci_epochs = 30;
  int sc_epochs = 50;

  // [predict]
  int k_ci = 3;
  int k_sc = 4;
  int k_total = 10;
  bool filter = true;
  bool correcting = true;

  // Throws UserError on a violated invariant.
  void validate() const;

  std::string train_path() const;
  std::string val_path() const;
  std::string test_path() const;
  std::string library_path() const;
  std::string ci_model_path() const;
  std::string sc_model_path() const;
  std::string output(std::string_view file) const;

  model::CenterModelConfig center_config() const;
  model::SynthonModelConfig synthon_config(int num_classes) const;
  pipeline::PredictOptions predict_options() const;

  // Every key with its value, in the INI layout accepted by load_config.
  std::string to_ini() const;
  nlohmann::ordered_json to_json() const;
};

// Sets one "section.key" from its textual value. Throws UserError for an
// unknown key or an unparsable value.
void apply_setting(RunConfig &config, std::string_view key, std::string_view value);

// Applies every entry of an INI text on top of `config`.
void apply_ini(RunConfig &config, std::string_view text);
// Same from a file; throws UserError when it cannot be read.
void apply_ini_file(RunConfig &config, const std::string &path);

// Every settable key, for help output and round-trip tests.
const std::vector<std::string> &config_keys();

// "8:1:1" or "0.8,0.1,0.1", scaled to sum 1; negative parts or a zero total are
// rejected.
std::array<double, 3> parse_ratios(std::string_view text);

// Independent seed for one consumer of randomness: the stream-th output of a
// generator seeded with the run seed.
std::uint64_t derive_seed(std::uint64_t seed, unsigned stream);

// Randomness consumers, in stream order. Replica r of a repeated run shifts
// every model stream by r * kSeedStreamsPerReplica.
enum SeedStream : unsigned {
  kSplitStream = 0,
  kCiInitStream = 1,
  kCiTrainStream = 2,
  kScInitStream = 3,
  kScTrainStream = 4,
};
inline constexpr unsigned kSeedStreamsPerReplica = 4;

}  // namespace semiretro::cli

#endif  // SEMIRETRO_CLI_CONFIG_H_
