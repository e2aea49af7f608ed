//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SEMIRETRO_CLI_COMMANDS_H_
#define SEMIRETRO_CLI_COMMANDS_H_

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "semiretro/cli/config.h"

namespace semiretro::cli {

// Every command reads its inputs and writes its outputs at the paths of the
// config; nothing depends on the clock, so equal configs give equal bytes.
// Failures the user can fix throw UserError.

// Shuffles the dataset with the split stream and writes train/val/test CSVs
// plus split.json.
void cmd_split(const RunConfig &config, std::ostream &log);

// Library JSON, coverage.csv, extraction_failures.csv and mine.json from the
// training split.
void cmd_mine_templates(const RunConfig &config, std::ostream &log);

// Checkpoint, "<checkpoint>.json" sidecar and a per-epoch loss CSV for each
// of run.repeat replicas.
void cmd_train_ci(const RunConfig &config, std::ostream &log);
void cmd_train_sc(const RunConfig &config, std::ostream &log);

struct PredictArgs {
  // Reaction records (the product side is used) or product SMILES lines,
  // optionally "id,smiles".
  std::string input;
  // Ground-truth stubs built from the input reactions instead of models.
  bool oracle = false;
};
// predictions.csv and predictions.json.
void cmd_predict(const RunConfig &config, const PredictArgs &args, std::ostream &log);

// Metric and result tables over the test split. File names carry the
// ablation and oracle tags, e.g. metrics.no_filter.csv; with run.repeat > 1
// each replica gets ".run<r>" tables and the plain name holds the mean.
void cmd_evaluate(const RunConfig &config, bool oracle, std::ostream &log);

// Coverage and redundancy report (stats.json, stats.csv) of data.dataset,
// or of the training split when no dataset is set.
void cmd_stats(const RunConfig &config, std::ostream &log);

// Path of replica r: the path itself for r = 0, else "<stem>.r<r><ext>".
std::string replica_path(const std::string &path, int r);
// Evaluate output name for the config's ablation flags, e.g.
// "metrics.no_filter.oracle.csv".
std::string tagged_name(const RunConfig &config, bool oracle, const std::string &stem,
                        const std::string &ext);

// Checkpoint plus sidecar carrying the architecture. Loading rebuilds the
// model from the sidecar and throws UserError on a missing or mismatched
// pair.
void save_center_model(const model::CenterModel &m, const std::string &path,
                       const nlohmann::ordered_json &metadata);
std::unique_ptr<model::CenterModel> load_center_model(const std::string &path);
void save_synthon_model(const model::SynthonModel &m, const std::string &path,
                        const nlohmann::ordered_json &metadata);
std::unique_ptr<model::SynthonModel> load_synthon_model(const std::string &path);

}  // namespace semiretro::cli

#endif  // SEMIRETRO_CLI_COMMANDS_H_
