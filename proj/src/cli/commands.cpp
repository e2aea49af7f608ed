//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/cli/commands.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "semiretro/chem/canonical.h"
#include "semiretro/chem/smiles.h"
#include "semiretro/tensor/optim.h"

namespace semiretro::cli {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kSidecarFormat = 1;
constexpr const char *kRecordHeader = "id,class,reactants>reagents>production\n";

void require_file(const std::string &path, const char *what) {
  if (!fs::is_regular_file(path))
    throw UserError(std::string("missing ") + what + ": " + path);
}

void write_text(const std::string &path, const std::string &text) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw UserError("cannot write " + path);
  out << text;
  if (!out)
    throw UserError("failed writing " + path);
}

std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw UserError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Dataset {
  std::vector<reaction::Reaction> reactions;
  std::vector<reaction::DecomposedReaction> data;
  std::size_t skipped = 0;
};

// Unparsable lines are skipped and counted rather than fatal.
Dataset load_dataset(const std::string &path, const char *what, std::ostream &log,
                     bool decompose = true) {
  require_file(path, what);
  Dataset d;
  std::vector<reaction::LoadIssue> issues;
  const auto records = reaction::read_records(path, &issues);
  d.reactions = reaction::load_reactions(records, &issues);
  d.skipped = issues.size();
  for (const auto &issue: issues)
    log << "warning: " << path << ":" << issue.line << ": " << issue.message << "\n";
  if (d.reactions.empty())
    throw UserError("no usable reactions in " + path);
  if (decompose) {
    d.data.reserve(d.reactions.size());
    for (const auto &r: d.reactions)
      d.data.push_back(reaction::decompose_reaction(r));
  }
  return d;
}

reaction::TemplateLibrary load_library(const std::string &path) {
  require_file(path, "template library");
  try {
    return reaction::TemplateLibrary::load(path);
  } catch (const std::exception &e) {
    throw UserError("unreadable template library " + path + ": " + e.what());
  }
}

ordered_json label_json(const reaction::CenterLabel &l) {
  ordered_json bonds = ordered_json::array();
  for (const auto &[a, b]: l.bond_centers)
    bonds.push_back({ a, b });
  return { { "atoms", l.atom_centers }, { "bonds", bonds } };
}

std::string loss_csv(const std::vector<double> &loss) {
  std::string out = "epoch,loss\n";
  for (std::size_t e = 0; e < loss.size(); ++e)
    out += std::to_string(e + 1) + "," + num(loss[e]) + "\n";
  return out;
}

ordered_json accuracy_json(std::span<const int> ks, const std::vector<double> &acc) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < ks.size(); ++i)
    j["top" + std::to_string(ks[i])] = acc[i];
  return j;
}

ordered_json run_metadata(const RunConfig &config) {
  return { { "seed", config.seed }, { "config", config.to_json() } };
}

ordered_json sidecar_of(const std::string &path) {
  const std::string side = path + ".json";
  require_file(path, "checkpoint");
  require_file(side, "checkpoint sidecar");
  ordered_json j;
  try {
    j = ordered_json::parse(read_text(side));
  } catch (const std::exception &e) {
    throw UserError("unreadable checkpoint sidecar " + side + ": " + e.what());
  }
  if (!j.contains("format") || j["format"] != kSidecarFormat)
    throw UserError("checkpoint sidecar " + side + " has an unsupported format version");
  return j;
}

ordered_json gnn_json(const model::DrgatConfig &g) {
  return { { "width", g.width }, { "layers", g.layers }, { "heads", g.heads },
           { "dropout", g.dropout } };
}

model::DrgatConfig gnn_from(const ordered_json &j) {
  model::DrgatConfig g;
  g.width = j.at("width").get<int>();
  g.layers = j.at("layers").get<int>();
  g.heads = j.at("heads").get<int>();
  g.dropout = j.at("dropout").get<double>();
  return g;
}

void load_params(const std::string &path, tensor::ParameterStore &params) {
  try {
    tensor::load_checkpoint(path, params);
  } catch (const tensor::CheckpointError &e) {
    throw UserError("checkpoint " + path + ": " + e.what());
  }
}

std::vector<std::pair<std::string, chem::MolGraph>> read_products(const std::string &path,
                                                                  std::ostream &log) {
  require_file(path, "input");
  std::ifstream in(path, std::ios::binary);
  std::vector<std::pair<std::string, chem::MolGraph>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || reaction::is_header_line(line)
        || line.starts_with("id,smiles") || line == "smiles")
      continue;
    try {
      if (line.find('>') != std::string::npos) {
        reaction::Reaction r = reaction::parse_reaction(line);
        out.emplace_back(r.id, std::move(r.product));
      } else {
        const std::size_t comma = line.find(',');
        const std::string id = comma == std::string::npos ? "p" + std::to_string(out.size() + 1)
                                                          : line.substr(0, comma);
        const std::string smiles = comma == std::string::npos ? line : line.substr(comma + 1);
        out.emplace_back(id, chem::parse_smiles(smiles));
      }
    } catch (const std::exception &e) {
      log << "warning: " << path << ":" << number << ": " << e.what() << "\n";
    }
  }
  if (out.empty())
    throw UserError("no usable products in " + path);
  return out;
}

ordered_json candidate_json(const pipeline::RetroCandidate &c, int rank) {
  return { { "rank", rank },
           { "reactants", c.reactants },
           { "prob", c.prob },
           { "center", label_json(c.center) },
           { "center_prob", c.center_prob },
           { "classes", c.classes },
           { "class_probs", c.class_probs } };
}

pipeline::AccuracyTable mean_table(const std::vector<pipeline::AccuracyTable> &runs) {
  pipeline::AccuracyTable m = runs.front();
  auto avg = [&](std::vector<double> pipeline::AccuracyTable::*field) {
    for (std::size_t i = 0; i < m.ks.size(); ++i) {
      double s = 0.0;
      for (const auto &t: runs)
        s += (t.*field)[i];
      (m.*field)[i] = s / static_cast<double>(runs.size());
    }
  };
  avg(&pipeline::AccuracyTable::ci);
  avg(&pipeline::AccuracyTable::sc);
  avg(&pipeline::AccuracyTable::end_to_end);
  avg(&pipeline::AccuracyTable::end_to_end_round_trippable);
  return m;
}

ordered_json table_json(const pipeline::AccuracyTable &t) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < t.ks.size(); ++i) {
    rows.push_back({ { "k", t.ks[i] },
                     { "ci_accuracy", t.ci[i] },
                     { "sc_accuracy", t.sc[i] },
                     { "end_to_end_accuracy", t.end_to_end[i] },
                     { "end_to_end_round_trippable", t.end_to_end_round_trippable[i] } });
  }
  return rows;
}

void print_table(std::ostream &log, const pipeline::AccuracyTable &t) {
  log << "k    CI       SC       end-to-end  (round-trippable)\n";
  for (std::size_t i = 0; i < t.ks.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-4d %-8.4f %-8.4f %-11.4f %.4f\n", t.ks[i], t.ci[i],
                  t.sc[i], t.end_to_end[i], t.end_to_end_round_trippable[i]);
    log << buf;
  }
}

}  // namespace

std::string replica_path(const std::string &path, int r) {
  if (r == 0)
    return path;
  const fs::path p(path);
  fs::path out = p.parent_path() / p.stem();
  out += ".r" + std::to_string(r);
  out += p.extension();
  return out.string();
}

std::string tagged_name(const RunConfig &config, bool oracle, const std::string &stem,
                        const std::string &ext) {
  std::string name = stem;
  if (!config.filter)
    name += ".no_filter";
  if (!config.correcting && !oracle)
    name += ".no_correcting";
  if (oracle)
    name += ".oracle";
  return name + ext;
}

void save_center_model(const model::CenterModel &m, const std::string &path,
                       const ordered_json &metadata) {
  const fs::path p(path);
  if (p.has_parent_path())
    fs::create_directories(p.parent_path());
  tensor::save_checkpoint(path, m.params());
  ordered_json side = { { "format", kSidecarFormat },
                        { "kind", "center_model" },
                        { "gnn", gnn_json(m.config().gnn) },
                        { "hidden", m.config().hidden } };
  if (metadata.is_object())
    side.update(metadata);
  write_text(path + ".json", side.dump(2) + "\n");
}

std::unique_ptr<model::CenterModel> load_center_model(const std::string &path) {
  const ordered_json side = sidecar_of(path);
  if (side.value("kind", "") != "center_model")
    throw UserError(path + " is not a center identification checkpoint");
  model::CenterModelConfig c;
  try {
    c.gnn = gnn_from(side.at("gnn"));
    c.hidden = side.at("hidden").get<int>();
  } catch (const std::exception &e) {
    throw UserError("checkpoint sidecar " + path + ".json: " + e.what());
  }
  auto m = std::make_unique<model::CenterModel>(c);
  load_params(path, m->params());
  return m;
}

void save_synthon_model(const model::SynthonModel &m, const std::string &path,
                        const ordered_json &metadata) {
  const fs::path p(path);
  if (p.has_parent_path())
    fs::create_directories(p.parent_path());
  tensor::save_checkpoint(path, m.params());
  const auto &c = m.config();
  ordered_json side = { { "format", kSidecarFormat },
                        { "kind", "synthon_model" },
                        { "gnn", gnn_json(c.gnn) },
                        { "hidden", c.hidden },
                        { "num_classes", c.num_classes },
                        { "class_embedding", c.class_embedding },
                        { "transformer_layers", c.transformer_layers },
                        { "transformer_heads", c.transformer_heads },
                        { "correcting", m.correcting() } };
  if (metadata.is_object())
    side.update(metadata);
  write_text(path + ".json", side.dump(2) + "\n");
}

std::unique_ptr<model::SynthonModel> load_synthon_model(const std::string &path) {
  const ordered_json side = sidecar_of(path);
  if (side.value("kind", "") != "synthon_model")
    throw UserError(path + " is not a synthon completion checkpoint");
  model::SynthonModelConfig c;
  bool correcting = true;
  try {
    c.gnn = gnn_from(side.at("gnn"));
    c.hidden = side.at("hidden").get<int>();
    c.num_classes = side.at("num_classes").get<int>();
    c.class_embedding = side.at("class_embedding").get<int>();
    c.transformer_layers = side.at("transformer_layers").get<int>();
    c.transformer_heads = side.at("transformer_heads").get<int>();
    correcting = side.at("correcting").get<bool>();
  } catch (const std::exception &e) {
    throw UserError("checkpoint sidecar " + path + ".json: " + e.what());
  }
  auto m = std::make_unique<model::SynthonModel>(c);
  load_params(path, m->params());
  m->set_correcting(correcting);
  return m;
}

void cmd_split(const RunConfig &config, std::ostream &log) {
  config.validate();
  if (config.dataset.empty())
    throw UserError("split needs data.dataset (--dataset)");
  require_file(config.dataset, "dataset");
  std::vector<reaction::LoadIssue> issues;
  const auto records = reaction::read_records(config.dataset, &issues);
  for (const auto &issue: issues)
    log << "warning: " << config.dataset << ":" << issue.line << ": " << issue.message << "\n";
  const int n = static_cast<int>(records.size());
  if (n == 0)
    throw UserError("no records in " + config.dataset);

  std::mt19937_64 rng(derive_seed(config.seed, kSplitStream));
  const std::vector<int> order = pipeline::shuffled_indices(n, rng);
  const int n_train = static_cast<int>(n * config.ratios[0]);
  const int n_val = static_cast<int>(n * config.ratios[1]);
  const int bounds[] = { 0, n_train, n_train + n_val, n };
  const std::string paths[] = { config.train_path(), config.val_path(), config.test_path() };
  const char *names[] = { "train", "val", "test" };
  ordered_json meta = run_metadata(config);
  meta["dataset"] = config.dataset;
  meta["records"] = n;
  meta["skipped_lines"] = issues.size();
  for (int s = 0; s < 3; ++s) {
    // Source order within each part keeps the files easy to diff.
    std::vector<int> part(order.begin() + bounds[s], order.begin() + bounds[s + 1]);
    std::sort(part.begin(), part.end());
    std::string text = kRecordHeader;
    for (int i: part)
      text += reaction::format_record(records[i]) + "\n";
    write_text(paths[s], text);
    meta[names[s]] = { { "path", paths[s] }, { "records", part.size() } };
    log << names[s] << ": " << part.size() << " records -> " << paths[s] << "\n";
  }
  write_text(config.output("split.json"), meta.dump(2) + "\n");
}

void cmd_mine_templates(const RunConfig &config, std::ostream &log) {
  config.validate();
  const Dataset d = load_dataset(config.train_path(), "training split", log);
  const auto lib = reaction::TemplateLibrary::build(d.data, config.k);
  lib.save(config.library_path());
  write_text(config.output("coverage.csv"), reaction::coverage_csv(lib));

  std::string failures = "id,synthon,cause,detail\n";
  std::map<std::string, int> causes;
  auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  for (const auto &r: d.data) {
    if (!r.labeled()) {
      const std::string cause(reaction::failure_name(r.label_failure));
      failures += r.id + ",-1," + cause + "," + clean(r.label_detail) + "\n";
      ++causes[cause];
      continue;
    }
    for (std::size_t s = 0; s < r.templates.size(); ++s) {
      if (r.templates[s].ok())
        continue;
      const std::string cause(reaction::failure_name(r.templates[s].failure));
      failures += r.id + "," + std::to_string(s) + "," + cause + ","
                  + clean(r.templates[s].detail) + "\n";
      ++causes[cause];
    }
  }
  write_text(config.output("extraction_failures.csv"), failures);

  ordered_json meta = run_metadata(config);
  meta["training_split"] = config.train_path();
  meta["reactions"] = d.reactions.size();
  meta["skipped_lines"] = d.skipped;
  meta["synthons"] = lib.num_synthons();
  meta["distinct_semi_templates"] = lib.num_distinct();
  meta["k"] = lib.k();
  meta["reaction_coverage"] = lib.reaction_coverage(lib.k());
  meta["synthon_coverage"] = lib.synthon_coverage(lib.k());
  meta["failures"] = causes;
  write_text(config.output("mine.json"), meta.dump(2) + "\n");

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%zu reactions, %zu distinct semi-templates; top-%d coverage %.2f%% of "
                "reactions, %.2f%% of synthons\n",
                d.reactions.size(), lib.num_distinct(), lib.k(),
                100.0 * lib.reaction_coverage(lib.k()), 100.0 * lib.synthon_coverage(lib.k()));
  log << buf << "library -> " << config.library_path() << "\n";
}

void cmd_train_ci(const RunConfig &config, std::ostream &log) {
  config.validate();
  const Dataset d = load_dataset(config.train_path(), "training split", log);
  const auto examples = pipeline::make_ci_examples(d.data, d.reactions);
  if (examples.empty())
    throw UserError("no labeled reactions in " + config.train_path());
  std::vector<pipeline::CiExample> val;
  if (fs::is_regular_file(config.val_path())) {
    const Dataset v = load_dataset(config.val_path(), "validation split", log);
    val = pipeline::make_ci_examples(v.data, v.reactions);
  }
  log << examples.size() << " training examples, " << val.size() << " validation examples\n";

  for (int r = 0; r < config.repeat; ++r) {
    const unsigned shift = static_cast<unsigned>(r) * kSeedStreamsPerReplica;
    const std::uint64_t init_seed = derive_seed(config.seed, kCiInitStream + shift);
    model::CenterModel m(config.center_config(), init_seed);
    pipeline::TrainOptions opt;
    opt.epochs = config.ci_epochs;
    opt.batch_size = config.batch;
    opt.max_lr = config.ci_lr;
    opt.seed = derive_seed(config.seed, kCiTrainStream + shift);
    opt.on_epoch = [&](int epoch, double loss) {
      log << "[ci" << (config.repeat > 1 ? " run " + std::to_string(r) : "") << "] epoch "
          << epoch + 1 << "/" << config.ci_epochs << " loss " << num(loss) << "\n";
    };
    const auto report = pipeline::train_center_model(m, examples, opt);

    const std::string path = replica_path(config.ci_model_path(), r);
    ordered_json meta = run_metadata(config);
    meta["replica"] = r;
    meta["init_seed"] = init_seed;
    meta["train_seed"] = opt.seed;
    meta["train_examples"] = examples.size();
    meta["steps"] = report.steps;
    meta["final_loss"] = report.epoch_loss.back();
    meta["train_accuracy"] =
        accuracy_json(pipeline::kDefaultKs, pipeline::center_accuracy(m, examples, pipeline::kDefaultKs));
    if (!val.empty()) {
      meta["val_accuracy"] =
          accuracy_json(pipeline::kDefaultKs, pipeline::center_accuracy(m, val, pipeline::kDefaultKs));
    }
    save_center_model(m, path, meta);
    write_text(replica_path(config.output("ci_loss.csv"), r), loss_csv(report.epoch_loss));
    log << "checkpoint -> " << path << " (train " << meta["train_accuracy"].dump() << ")\n";
  }
}

void cmd_train_sc(const RunConfig &config, std::ostream &log) {
  config.validate();
  const auto lib = load_library(config.library_path());
  const Dataset d = load_dataset(config.train_path(), "training split", log);
  const auto examples = pipeline::make_sc_examples(d.data, d.reactions, lib);
  if (examples.empty())
    throw UserError("no decomposable reactions in " + config.train_path());
  std::vector<pipeline::ScExample> val;
  if (fs::is_regular_file(config.val_path())) {
    const Dataset v = load_dataset(config.val_path(), "validation split", log);
    val = pipeline::make_sc_examples(v.data, v.reactions, lib);
  }
  log << examples.size() << " training examples, " << val.size() << " validation examples, "
      << lib.num_classes() << " classes\n";

  for (int r = 0; r < config.repeat; ++r) {
    const unsigned shift = static_cast<unsigned>(r) * kSeedStreamsPerReplica;
    const std::uint64_t init_seed = derive_seed(config.seed, kScInitStream + shift);
    model::SynthonModel m(config.synthon_config(lib.num_classes()), init_seed);
    m.set_correcting(config.correcting);
    pipeline::TrainOptions opt;
    opt.epochs = config.sc_epochs;
    opt.batch_size = config.batch;
    opt.max_lr = config.sc_lr;
    opt.seed = derive_seed(config.seed, kScTrainStream + shift);
    opt.on_epoch = [&](int epoch, double loss) {
      log << "[sc" << (config.repeat > 1 ? " run " + std::to_string(r) : "") << "] epoch "
          << epoch + 1 << "/" << config.sc_epochs << " loss " << num(loss) << "\n";
    };
    const auto report = pipeline::train_synthon_model(m, examples, opt);

    const std::string path = replica_path(config.sc_model_path(), r);
    const auto *prior = config.filter ? &lib : nullptr;
    ordered_json meta = run_metadata(config);
    meta["replica"] = r;
    meta["init_seed"] = init_seed;
    meta["train_seed"] = opt.seed;
    meta["library"] = config.library_path();
    meta["train_examples"] = examples.size();
    meta["steps"] = report.steps;
    meta["final_loss"] = report.epoch_loss.back();
    meta["train_accuracy"] = accuracy_json(
        pipeline::kDefaultKs, pipeline::synthon_accuracy(m, examples, pipeline::kDefaultKs, prior));
    if (!val.empty()) {
      meta["val_accuracy"] = accuracy_json(
          pipeline::kDefaultKs, pipeline::synthon_accuracy(m, val, pipeline::kDefaultKs, prior));
    }
    save_synthon_model(m, path, meta);
    write_text(replica_path(config.output("sc_loss.csv"), r), loss_csv(report.epoch_loss));
    log << "checkpoint -> " << path << " (train " << meta["train_accuracy"].dump() << ")\n";
  }
}

void cmd_predict(const RunConfig &config, const PredictArgs &args, std::ostream &log) {
  config.validate();
  if (args.input.empty())
    throw UserError("predict needs an input file (--input)");
  const auto lib = load_library(config.library_path());
  const auto products = read_products(args.input, log);

  std::unique_ptr<pipeline::CenterPredictor> ci;
  std::unique_ptr<pipeline::SynthonPredictor> sc;
  std::unique_ptr<model::CenterModel> ci_model;
  std::unique_ptr<model::SynthonModel> sc_model;
  Dataset truth;
  if (args.oracle) {
    truth = load_dataset(args.input, "input", log);
    ci = std::make_unique<pipeline::OracleCenterPredictor>(truth.reactions, truth.data);
    sc = std::make_unique<pipeline::OracleSynthonPredictor>(truth.reactions, truth.data, lib);
  } else {
    ci_model = load_center_model(config.ci_model_path());
    sc_model = load_synthon_model(config.sc_model_path());
    if (sc_model->config().num_classes != lib.num_classes())
      throw UserError("synthon model has " + std::to_string(sc_model->config().num_classes)
                      + " classes but the library has " + std::to_string(lib.num_classes()));
    sc_model->set_correcting(config.correcting);
    ci = std::make_unique<pipeline::ModelCenterPredictor>(*ci_model);
    sc = std::make_unique<pipeline::ModelSynthonPredictor>(*sc_model);
  }

  const pipeline::PredictOptions options = config.predict_options();
  std::vector<pipeline::RetroPrediction> predictions;
  ordered_json items = ordered_json::array();
  for (const auto &[id, product]: products) {
    pipeline::RetroPrediction p = pipeline::predict_reactants(product, *ci, *sc, lib, options);
    p.id = id;
    ordered_json item = { { "id", id }, { "product", chem::molecule_key(product) } };
    if (ci_model)
      item["centers"] = pipeline::center_prediction_json(ci_model->predict(product), config.k_ci);
    ordered_json cands = ordered_json::array();
    for (std::size_t r = 0; r < p.candidates.size(); ++r)
      cands.push_back(candidate_json(p.candidates[r], static_cast<int>(r + 1)));
    item["candidates"] = std::move(cands);
    items.push_back(std::move(item));
    predictions.push_back(std::move(p));
  }
  write_text(config.output("predictions.csv"), pipeline::predictions_csv(predictions));
  ordered_json out = run_metadata(config);
  out["input"] = args.input;
  out["oracle"] = args.oracle;
  out["products"] = std::move(items);
  write_text(config.output("predictions.json"), out.dump(2) + "\n");
  log << predictions.size() << " products -> " << config.output("predictions.csv") << "\n";
}

void cmd_evaluate(const RunConfig &config, bool oracle, std::ostream &log) {
  config.validate();
  const auto lib = load_library(config.library_path());
  const Dataset d = load_dataset(config.test_path(), "test split", log);
  const pipeline::PredictOptions options = config.predict_options();
  const int runs = oracle ? 1 : config.repeat;
  // Fail before writing anything when a replica is missing.
  for (int r = 0; r < runs && !oracle; ++r) {
    sidecar_of(replica_path(config.ci_model_path(), r));
    sidecar_of(replica_path(config.sc_model_path(), r));
  }

  std::vector<pipeline::AccuracyTable> tables;
  ordered_json run_info = ordered_json::array();
  for (int r = 0; r < runs; ++r) {
    pipeline::EvaluationOutput out;
    if (oracle) {
      const pipeline::OracleCenterPredictor ci(d.reactions, d.data);
      const pipeline::OracleSynthonPredictor sc(d.reactions, d.data, lib);
      out = pipeline::evaluate(d.reactions, d.data, ci, sc, lib, options);
    } else {
      const std::string ci_path = replica_path(config.ci_model_path(), r);
      const std::string sc_path = replica_path(config.sc_model_path(), r);
      const auto ci_model = load_center_model(ci_path);
      const auto sc_model = load_synthon_model(sc_path);
      if (sc_model->config().num_classes != lib.num_classes())
        throw UserError("synthon model " + sc_path + " has "
                        + std::to_string(sc_model->config().num_classes)
                        + " classes but the library has " + std::to_string(lib.num_classes()));
      sc_model->set_correcting(config.correcting);
      const pipeline::ModelCenterPredictor ci(*ci_model);
      const pipeline::ModelSynthonPredictor sc(*sc_model);
      out = pipeline::evaluate(d.reactions, d.data, ci, sc, lib, options);
      run_info.push_back({ { "ci_model", ci_path }, { "sc_model", sc_path } });
    }
    if (runs > 1) {
      const std::string tag = ".run" + std::to_string(r);
      write_text(config.output(tagged_name(config, oracle, "metrics" + tag, ".csv")),
                 pipeline::metrics_csv(out.table));
      write_text(config.output(tagged_name(config, oracle, "results" + tag, ".csv")),
                 pipeline::predictions_csv(out.predictions));
    } else {
      write_text(config.output(tagged_name(config, oracle, "results", ".csv")),
                 pipeline::predictions_csv(out.predictions));
    }
    tables.push_back(out.table);
  }

  const pipeline::AccuracyTable table = mean_table(tables);
  const std::string metrics_path = config.output(tagged_name(config, oracle, "metrics", ".csv"));
  write_text(metrics_path, pipeline::metrics_csv(table));

  ordered_json meta = run_metadata(config);
  meta["test_split"] = config.test_path();
  meta["oracle"] = oracle;
  meta["runs"] = runs;
  meta["models"] = run_info;
  meta["num_products"] = table.num_products;
  meta["num_round_trippable"] = table.num_round_trippable;
  meta["metrics"] = table_json(table);
  if (runs > 1) {
    ordered_json per = ordered_json::array();
    for (const auto &t: tables)
      per.push_back(table_json(t));
    meta["per_run"] = std::move(per);
  }
  write_text(config.output(tagged_name(config, oracle, "evaluate", ".json")), meta.dump(2) + "\n");

  log << table.num_products << " products (" << table.num_round_trippable
      << " round-trippable)" << (runs > 1 ? ", mean of " + std::to_string(runs) + " runs" : "")
      << "\n";
  print_table(log, table);
  log << "metrics -> " << metrics_path << "\n";
}

void cmd_stats(const RunConfig &config, std::ostream &log) {
  config.validate();
  const std::string path = config.dataset.empty() ? config.train_path() : config.dataset;
  const Dataset d = load_dataset(path, "dataset", log);
  const auto lib = reaction::TemplateLibrary::build(d.data, config.k);

  std::size_t labeled = 0, extracted = 0;
  std::map<std::string, int> causes;
  for (const auto &r: d.data) {
    labeled += r.labeled();
    extracted += r.fully_extracted();
    if (!r.labeled())
      ++causes[std::string(reaction::failure_name(r.label_failure))];
    for (const auto &t: r.templates) {
      if (!t.ok())
        ++causes[std::string(reaction::failure_name(t.failure))];
    }
  }
  const auto full = lib.full_template_curve();
  const std::size_t semi = lib.num_distinct();
  ordered_json coverage = ordered_json::array();
  for (int k: { 1, 5, 10, 20, 50, 100, 150, config.k }) {
    if (!coverage.empty() && coverage.back()["k"].get<int>() >= k)
      continue;
    const double f = full.empty() ? 0.0 : full[std::min<std::size_t>(k, full.size()) - 1];
    coverage.push_back({ { "k", k },
                         { "semi_template_reaction_coverage", lib.reaction_coverage(k) },
                         { "semi_template_synthon_coverage", lib.synthon_coverage(k) },
                         { "full_template_coverage", f } });
  }
  ordered_json meta = run_metadata(config);
  meta["dataset"] = path;
  meta["reactions"] = d.reactions.size();
  meta["skipped_lines"] = d.skipped;
  meta["labeled"] = labeled;
  meta["fully_extracted"] = extracted;
  meta["synthons"] = lib.num_synthons();
  meta["distinct_semi_templates"] = semi;
  meta["distinct_full_templates"] = full.size();
  // How many whole-reaction templates each semi-template stands in for.
  meta["redundancy"] = semi == 0 ? 0.0 : static_cast<double>(full.size()) / semi;
  meta["coverage"] = std::move(coverage);
  meta["failures"] = causes;
  write_text(config.output("stats.json"), meta.dump(2) + "\n");
  write_text(config.output("stats.csv"), reaction::coverage_csv(lib));

  log << d.reactions.size() << " reactions, " << extracted << " fully extracted, " << semi
      << " distinct semi-templates vs " << full.size() << " full templates\n";
  for (const auto &row: meta["coverage"]) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "top-%-4d semi-template %.2f%%  full template %.2f%%\n",
                  row["k"].get<int>(), 100.0 * row["semi_template_reaction_coverage"].get<double>(),
                  100.0 * row["full_template_coverage"].get<double>());
    log << buf;
  }
}

}  // namespace semiretro::cli
