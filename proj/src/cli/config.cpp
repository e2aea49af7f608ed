//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "semiretro/cli/config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

namespace semiretro::cli {
namespace {

std::string quoted_key(std::string_view key) {
  return "'" + std::string(key) + "'";
}

int parse_int(std::string_view key, std::string_view text) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw UserError(quoted_key(key) + " expects an integer, got '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw UserError(quoted_key(key) + " expects a non-negative integer, got '"
                    + std::string(text) + "'");
  return v;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw UserError(quoted_key(key) + " expects a number, got '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  std::string t(text);
  for (char &c: t)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "true" || t == "1" || t == "yes" || t == "on")
    return true;
  if (t == "false" || t == "0" || t == "no" || t == "off")
    return false;
  throw UserError(quoted_key(key) + " expects true or false, got '" + std::string(text) + "'");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Shortest form that still parses back to the same value.
  for (int p = 1; p <= 17; ++p) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", p, v);
    if (std::strtod(shorter, nullptr) == v)
      return shorter;
  }
  return buf;
}

struct Setting {
  std::string key;
  std::function<void(RunConfig &, std::string_view)> set;
  std::function<std::string(const RunConfig &)> get;
};

template <typename T>
Setting int_setting(std::string key, T RunConfig::*field) {
  return { key,
           [key, field](RunConfig &c, std::string_view v) { c.*field = parse_int(key, v); },
           [field](const RunConfig &c) { return std::to_string(c.*field); } };
}

Setting double_setting(std::string key, double RunConfig::*field) {
  return { key,
           [key, field](RunConfig &c, std::string_view v) { c.*field = parse_double(key, v); },
           [field](const RunConfig &c) { return format_double(c.*field); } };
}

Setting bool_setting(std::string key, bool RunConfig::*field) {
  return { key,
           [key, field](RunConfig &c, std::string_view v) { c.*field = parse_bool(key, v); },
           [field](const RunConfig &c) { return std::string(c.*field ? "true" : "false"); } };
}

Setting string_setting(std::string key, std::string RunConfig::*field) {
  return { key, [field](RunConfig &c, std::string_view v) { c.*field = std::string(v); },
           [field](const RunConfig &c) { return c.*field; } };
}

const std::vector<Setting> &settings() {
  static const std::vector<Setting> all = [] {
    std::vector<Setting> s;
    s.push_back({ "run.seed",
                  [](RunConfig &c, std::string_view v) { c.seed = parse_u64("run.seed", v); },
                  [](const RunConfig &c) { return std::to_string(c.seed); } });
    s.push_back(string_setting("run.out_dir", &RunConfig::out_dir));
    s.push_back(int_setting("run.repeat", &RunConfig::repeat));
    s.push_back(string_setting("data.dataset", &RunConfig::dataset));
    s.push_back(string_setting("data.train", &RunConfig::train));
    s.push_back(string_setting("data.val", &RunConfig::val));
    s.push_back(string_setting("data.test", &RunConfig::test));
    s.push_back(string_setting("data.library", &RunConfig::library));
    s.push_back(string_setting("data.ci_model", &RunConfig::ci_model));
    s.push_back(string_setting("data.sc_model", &RunConfig::sc_model));
    s.push_back({ "split.ratios",
                  [](RunConfig &c, std::string_view v) { c.ratios = parse_ratios(v); },
                  [](const RunConfig &c) {
                    return format_double(c.ratios[0]) + ":" + format_double(c.ratios[1]) + ":"
                           + format_double(c.ratios[2]);
                  } });
    s.push_back(int_setting("templates.k", &RunConfig::k));
    s.push_back(int_setting("model.width", &RunConfig::width));
    s.push_back(int_setting("model.layers", &RunConfig::layers));
    s.push_back(int_setting("model.heads", &RunConfig::heads));
    s.push_back(double_setting("model.dropout", &RunConfig::dropout));
    s.push_back(int_setting("model.hidden", &RunConfig::hidden));
    s.push_back(int_setting("model.class_embedding", &RunConfig::class_embedding));
    s.push_back(int_setting("model.transformer_layers", &RunConfig::transformer_layers));
    s.push_back(int_setting("model.transformer_heads", &RunConfig::transformer_heads));
    s.push_back(double_setting("train.ci_lr", &RunConfig::ci_lr));
    s.push_back(double_setting("train.sc_lr", &RunConfig::sc_lr));
    s.push_back(int_setting("train.batch", &RunConfig::batch));
    s.push_back(int_setting("train.ci_epochs", &RunConfig::ci_epochs));
    s.push_back(int_setting("train.sc_epochs", &RunConfig::sc_epochs));
    s.push_back(int_setting("predict.k_ci", &RunConfig::k_ci));
    s.push_back(int_setting("predict.k_sc", &RunConfig::k_sc));
    s.push_back(int_setting("predict.k_total", &RunConfig::k_total));
    s.push_back(bool_setting("predict.filter", &RunConfig::filter));
    s.push_back(bool_setting("predict.correcting", &RunConfig::correcting));
    return s;
  }();
  return all;
}

std::string derived(const RunConfig &c, const std::string &explicit_path, std::string_view file) {
  return explicit_path.empty() ? c.output(file) : explicit_path;
}

}  // namespace

std::array<double, 3> parse_ratios(std::string_view text) {
  std::vector<std::string_view> parts;
  const char sep = text.find(':') != std::string_view::npos ? ':' : ',';
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    std::string_view part = text.substr(start, end == std::string_view::npos ? end : end - start);
    while (!part.empty() && part.front() == ' ')
      part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ')
      part.remove_suffix(1);
    parts.push_back(part);
    if (end == std::string_view::npos)
      break;
    start = end + 1;
  }
  if (parts.size() != 3)
    throw UserError("split.ratios needs three parts (train:val:test), got '" + std::string(text)
                    + "'");
  std::array<double, 3> r {};
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    r[i] = parse_double("split.ratios", parts[i]);
    if (r[i] < 0.0)
      throw UserError("split.ratios parts must be non-negative");
    total += r[i];
  }
  if (!(total > 0.0))
    throw UserError("split.ratios must not all be zero");
  // Parts that already sum to 1 stay as written so printed values reparse
  // to the same numbers.
  if (std::abs(total - 1.0) > 1e-9) {
    for (double &v: r)
      v /= total;
  }
  return r;
}

std::uint64_t derive_seed(std::uint64_t seed, unsigned stream) {
  std::mt19937_64 gen(seed);
  gen.discard(stream);
  return gen();
}

void RunConfig::validate() const {
  auto positive = [](const char *key, long long v) {
    if (v <= 0)
      throw UserError(std::string("'") + key + "' must be positive, got " + std::to_string(v));
  };
  positive("run.repeat", repeat);
  positive("templates.k", k);
  positive("model.width", width);
  positive("model.layers", layers);
  positive("model.heads", heads);
  positive("model.hidden", hidden);
  positive("model.class_embedding", class_embedding);
  positive("model.transformer_layers", transformer_layers);
  positive("model.transformer_heads", transformer_heads);
  positive("train.batch", batch);
  positive("train.ci_epochs", ci_epochs);
  positive("train.sc_epochs", sc_epochs);
  positive("predict.k_ci", k_ci);
  positive("predict.k_sc", k_sc);
  positive("predict.k_total", k_total);
  if (!(ci_lr > 0.0) || !(sc_lr > 0.0))
    throw UserError("learning rates must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw UserError("'model.dropout' must lie in [0, 1)");
  if (width % heads != 0)
    throw UserError("'model.width' must be divisible by 'model.heads'");
  const int token = 4 * width * layers + class_embedding;
  if (token % transformer_heads != 0)
    throw UserError("4 * width * layers + class_embedding (" + std::to_string(token)
                    + ") must be divisible by 'model.transformer_heads'");
  if (ratios[0] <= 0.0)
    throw UserError("the training split must not be empty");
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9)
    throw UserError("split.ratios must sum to 1");
  if (out_dir.empty())
    throw UserError("'run.out_dir' must not be empty");
}

std::string RunConfig::output(std::string_view file) const {
  return (std::filesystem::path(out_dir) / file).string();
}

std::string RunConfig::train_path() const { return derived(*this, train, "train.csv"); }
std::string RunConfig::val_path() const { return derived(*this, val, "val.csv"); }
std::string RunConfig::test_path() const { return derived(*this, test, "test.csv"); }
std::string RunConfig::library_path() const { return derived(*this, library, "library.json"); }
std::string RunConfig::ci_model_path() const { return derived(*this, ci_model, "ci.ckpt"); }
std::string RunConfig::sc_model_path() const { return derived(*this, sc_model, "sc.ckpt"); }

model::CenterModelConfig RunConfig::center_config() const {
  model::CenterModelConfig c;
  c.gnn.width = width;
  c.gnn.layers = layers;
  c.gnn.heads = heads;
  c.gnn.dropout = dropout;
  c.hidden = hidden;
  return c;
}

model::SynthonModelConfig RunConfig::synthon_config(int num_classes) const {
  model::SynthonModelConfig c;
  c.gnn.width = width;
  c.gnn.layers = layers;
  c.gnn.heads = heads;
  c.gnn.dropout = dropout;
  c.hidden = hidden;
  c.num_classes = num_classes;
  c.class_embedding = class_embedding;
  c.transformer_layers = transformer_layers;
  c.transformer_heads = transformer_heads;
  return c;
}

pipeline::PredictOptions RunConfig::predict_options() const {
  pipeline::PredictOptions o;
  o.k_ci = k_ci;
  o.k_sc = k_sc;
  o.k_total = k_total;
  o.filter = filter;
  return o;
}

std::string RunConfig::to_ini() const {
  std::string out, section;
  for (const Setting &s: settings()) {
    const std::size_t dot = s.key.find('.');
    const std::string sec = s.key.substr(0, dot);
    if (sec != section) {
      out += (out.empty() ? "[" : "\n[") + sec + "]\n";
      section = sec;
    }
    out += s.key.substr(dot + 1) + " = \"" + s.get(*this) + "\"\n";
  }
  return out;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const Setting &s: settings())
    j[s.key] = s.get(*this);
  return j;
}

const std::vector<std::string> &config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Setting &s: settings())
      k.push_back(s.key);
    return k;
  }();
  return keys;
}

void apply_setting(RunConfig &config, std::string_view key, std::string_view value) {
  for (const Setting &s: settings()) {
    if (s.key == key) {
      s.set(config, value);
      return;
    }
  }
  throw UserError("unknown setting " + quoted_key(key));
}

void apply_ini(RunConfig &config, std::string_view text) {
  std::istringstream in { std::string(text) };
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error &e) {
    throw UserError(std::string("config: ") + e.what());
  }
  for (const CLI::ConfigItem &item: items) {
    // Section open/close markers.
    if (item.name == "++" || item.name == "--")
      continue;
    std::string section;
    for (const std::string &p: item.parents)
      section += (section.empty() ? "" : ".") + p;
    if (section.empty() || section == "default")
      section = "run";
    std::string value;
    for (const std::string &v: item.inputs)
      value += (value.empty() ? "" : ",") + v;
    apply_setting(config, section + "." + item.name, value);
  }
}

void apply_ini_file(RunConfig &config, const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw UserError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_ini(config, ss.str());
}

}  // namespace semiretro::cli
