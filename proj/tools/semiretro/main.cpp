//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

// semiretro <command> [options]. Settings come from defaults, then the
// --config file, then --set entries, then dedicated flags.
// Exit codes: 0 success, 1 user error, 2 internal error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semiretro/cli/commands.h"
#include "semiretro/reaction/reaction.h"

namespace {

using semiretro::cli::RunConfig;

struct Flag {
  const char *name;
  const char *key;
  const char *help;
};

// Flags that map one-to-one onto config keys.
constexpr Flag kFlags[] = {
  { "--seed", "run.seed", "Run seed; every random stream derives from it" },
  { "--out-dir", "run.out_dir", "Directory for outputs and derived paths" },
  { "--repeat", "run.repeat", "Independent training runs; evaluation reports their mean" },
  { "--dataset", "data.dataset", "Reaction CSV (id,class,mapped reaction SMILES)" },
  { "--train", "data.train", "Training split (default <out-dir>/train.csv)" },
  { "--val", "data.val", "Validation split (default <out-dir>/val.csv)" },
  { "--test", "data.test", "Test split (default <out-dir>/test.csv)" },
  { "--library", "data.library", "Template library (default <out-dir>/library.json)" },
  { "--ci-model", "data.ci_model", "Center model checkpoint (default <out-dir>/ci.ckpt)" },
  { "--sc-model", "data.sc_model", "Synthon model checkpoint (default <out-dir>/sc.ckpt)" },
  { "--ratios", "split.ratios", "Train:val:test ratios, e.g. 8:1:1" },
  { "--k", "templates.k", "Number of semi-template classes" },
  { "--width", "model.width", "Graph network width" },
  { "--layers", "model.layers", "Graph attention layers" },
  { "--heads", "model.heads", "Graph attention heads" },
  { "--dropout", "model.dropout", "Dropout on aggregated messages during training" },
  { "--hidden", "model.hidden", "Hidden width of the prediction heads" },
  { "--class-embedding", "model.class_embedding", "Template class embedding width" },
  { "--transformer-layers", "model.transformer_layers", "Self-correction blocks" },
  { "--transformer-heads", "model.transformer_heads", "Self-correction attention heads" },
  { "--ci-lr", "train.ci_lr", "Peak learning rate of the center model" },
  { "--sc-lr", "train.sc_lr", "Peak learning rate of the synthon model" },
  { "--batch", "train.batch", "Batch size" },
  { "--ci-epochs", "train.ci_epochs", "Center model epochs" },
  { "--sc-epochs", "train.sc_epochs", "Synthon model epochs" },
  { "--k-ci", "predict.k_ci", "Centers kept per product" },
  { "--k-sc", "predict.k_sc", "Template assignments kept per center" },
  { "--k-total", "predict.k_total", "Candidates kept per product" },
};

struct Cli {
  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::string> flag_values = std::vector<std::string>(std::size(kFlags));
  std::vector<CLI::Option *> flag_options;
  CLI::Option *no_filter = nullptr;
  CLI::Option *no_correcting = nullptr;
  bool oracle = false;
  std::string input;
};

RunConfig resolve(const Cli &cli) {
  RunConfig config;
  if (!cli.config_file.empty())
    semiretro::cli::apply_ini_file(config, cli.config_file);
  for (const std::string &s: cli.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw semiretro::cli::UserError("--set expects section.key=value, got '" + s + "'");
    semiretro::cli::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  for (std::size_t i = 0; i < std::size(kFlags); ++i) {
    if (cli.flag_options[i]->count() > 0)
      semiretro::cli::apply_setting(config, kFlags[i].key, cli.flag_values[i]);
  }
  if (cli.no_filter->count() > 0)
    config.filter = false;
  if (cli.no_correcting->count() > 0)
    config.correcting = false;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "Semi-template single-step retrosynthesis", "semiretro" };
  app.require_subcommand(1);
  app.fallthrough();

  Cli cli;
  app.add_option("--config", cli.config_file, "INI file with [section] key = value settings");
  app.add_option("--set", cli.sets, "Override one setting, section.key=value (repeatable)");
  for (std::size_t i = 0; i < std::size(kFlags); ++i)
    cli.flag_options.push_back(app.add_option(kFlags[i].name, cli.flag_values[i], kFlags[i].help));
  cli.no_filter = app.add_flag("--no-filter", "Disable the template pair prior");
  cli.no_correcting = app.add_flag("--no-correcting", "Disable self-correction");

  auto *split = app.add_subcommand("split", "Split a dataset into train/val/test files");
  auto *mine = app.add_subcommand("mine-templates", "Build the template library from the training split");
  auto *train_ci = app.add_subcommand("train-ci", "Train the center identification model");
  auto *train_sc = app.add_subcommand("train-sc", "Train the synthon completion model");
  auto *predict = app.add_subcommand("predict", "Rank reactant sets for products");
  predict->add_option("--input", cli.input, "Products or reaction records")->required();
  predict->add_flag("--oracle", cli.oracle, "Use ground-truth stubs built from the input reactions");
  auto *evaluate = app.add_subcommand("evaluate", "Top-k accuracies on the test split");
  evaluate->add_flag("--oracle", cli.oracle, "Use ground-truth stubs built from the test split");
  auto *stats = app.add_subcommand("stats", "Template coverage and redundancy report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunConfig config = resolve(cli);
    std::ostream &log = std::cout;
    if (split->parsed())
      semiretro::cli::cmd_split(config, log);
    else if (mine->parsed())
      semiretro::cli::cmd_mine_templates(config, log);
    else if (train_ci->parsed())
      semiretro::cli::cmd_train_ci(config, log);
    else if (train_sc->parsed())
      semiretro::cli::cmd_train_sc(config, log);
    else if (predict->parsed())
      semiretro::cli::cmd_predict(config, { cli.input, cli.oracle }, log);
    else if (evaluate->parsed())
      semiretro::cli::cmd_evaluate(config, cli.oracle, log);
    else if (stats->parsed())
      semiretro::cli::cmd_stats(config, log);
    return 0;
  } catch (const semiretro::cli::UserError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const semiretro::reaction::ReactionError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
