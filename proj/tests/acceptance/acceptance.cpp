//
// Project semiretro - Copyright 2026 semiretro authors.
// SPDX-License-Identifier: Apache-2.0
//

// End-to-end acceptance checks. Prints one PASS / FAIL line per criterion
// and exits nonzero when any fails. Criteria 7, 9 and 10 drive the real
// `semiretro` executable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiretro/chem/canonical.h"
#include "semiretro/chem/match.h"
#include "semiretro/chem/smiles.h"
#include "semiretro/model/center_model.h"
#include "semiretro/model/drgat.h"
#include "semiretro/model/synthon_model.h"
#include "semiretro/pipeline/pipeline.h"
#include "semiretro/pipeline/train.h"
#include "semiretro/reaction/template_library.h"
#include "../common/gradcheck.h"
#include "../common/op_cases.h"
#include "../common/test_util.h"

namespace {

namespace fs = std::filesystem;
using namespace semiretro;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<reaction::Reaction> &corpus() {
  static const std::vector<reaction::Reaction> data = [] {
    const auto records = reaction::read_records(testing::data_dir() + "/mini_corpus.csv");
    return reaction::load_reactions(records);
  }();
  return data;
}

const std::vector<reaction::DecomposedReaction> &decomposed() {
  static const std::vector<reaction::DecomposedReaction> data = [] {
    std::vector<reaction::DecomposedReaction> out;
    for (const auto &r: corpus())
      out.push_back(reaction::decompose_reaction(r));
    return out;
  }();
  return data;
}

// Distinct molecules (by canonical SMILES with maps) of every reaction.
std::vector<const chem::MolGraph *> distinct_molecules() {
  std::vector<const chem::MolGraph *> out;
  std::set<std::string> seen;
  for (const auto &r: corpus()) {
    if (seen.insert(chem::canonical_smiles(r.product)).second)
      out.push_back(&r.product);
    for (const auto &m: r.reactants) {
      if (seen.insert(chem::canonical_smiles(m)).second)
        out.push_back(&m);
    }
  }
  return out;
}

fs::path work_dir() {
  const fs::path dir = fs::path(SEMIRETRO_ACCEPTANCE_WORK_DIR) / "acceptance_work";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string &args, const fs::path &log) {
  const std::string cmd = std::string("\"") + SEMIRETRO_CLI + "\" " + args + " >> \""
                          + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. parse -> write -> parse is isomorphic for every corpus molecule, both
// through the plain writer and the canonical writer. The oracle is a
// labeled graph isomorphism search, independent of canonical ranking.
Outcome smiles_round_trip() {
  const auto t0 = Clock::now();
  const auto mols = distinct_molecules();
  int failures = 0;
  for (const chem::MolGraph *g: mols) {
    try {
      const chem::MolGraph a = chem::parse_smiles(chem::write_smiles(*g));
      const chem::MolGraph b = chem::parse_smiles(chem::canonical_smiles(*g));
      if (!chem::is_isomorphic(*g, a, true) || !chem::is_isomorphic(*g, b, true))
        ++failures;
    } catch (const std::exception &) {
      ++failures;
    }
  }
  const double t = seconds_since(t0);
  return { mols.size() >= 2000 && failures == 0 && t < 30.0,
           fmt("%zu distinct molecules (need >= 2000), %d failures, %.1f s (limit 30 s)",
               mols.size(), failures, t) };
}

// 2. One canonical string per molecule under atom and bond reordering.
Outcome canonical_invariance() {
  const auto t0 = Clock::now();
  const auto mols = distinct_molecules();
  std::mt19937_64 rng(2);
  std::vector<const chem::MolGraph *> sample = mols;
  std::shuffle(sample.begin(), sample.end(), rng);
  sample.resize(std::min<std::size_t>(200, sample.size()));
  int violations = 0;
  for (const chem::MolGraph *g: sample) {
    const std::string ref = chem::canonical_smiles(*g);
    for (int k = 0; k < 20; ++k) {
      const auto moved = testing::relabel(*g, testing::random_permutation(g->num_atoms(), rng), rng);
      violations += chem::canonical_smiles(moved) != ref;
    }
  }
  // Exhaustive: every corpus molecule with at most 7 atoms plus random ones.
  std::vector<chem::MolGraph> small;
  for (const chem::MolGraph *g: mols) {
    if (g->num_atoms() <= 7)
      small.push_back(*g);
  }
  const std::size_t from_corpus = small.size();
  for (int i = 0; i < 40; ++i)
    small.push_back(testing::random_molecule(2 + i % 6, rng));
  std::size_t perms = 0;
  for (const chem::MolGraph &g: small) {
    const std::string ref = chem::canonical_smiles(g);
    std::vector<int> p(g.num_atoms());
    std::iota(p.begin(), p.end(), 0);
    do {
      violations += chem::canonical_smiles(testing::relabel(g, p, rng)) != ref;
      ++perms;
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return { sample.size() == 200 && violations == 0,
           fmt("200 x 20 sampled permutations; exhaustive over %zu molecules <= 7 atoms "
               "(%zu from corpus, %zu orderings); %d violations, %.1f s",
               small.size(), from_corpus, perms, violations, seconds_since(t0)) };
}

// 3. Extract each synthon's template, apply it, and compare with the true
// reactant by labeled isomorphism.
Outcome template_round_trip() {
  const auto t0 = Clock::now();
  const std::size_t n = std::min<std::size_t>(1000, corpus().size());
  std::size_t ok = 0;
  std::map<std::string, int> causes;
  std::string log = "id,synthon,cause,detail\n";
  auto fail = [&](const std::string &id, int s, const std::string &cause, std::string detail) {
    std::replace(detail.begin(), detail.end(), ',', ';');
    log += id + "," + std::to_string(s) + "," + cause + "," + detail + "\n";
    ++causes[cause];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const reaction::Reaction &r = corpus()[i];
    const reaction::DecomposedReaction d = reaction::decompose_reaction(r, false);
    if (!d.labeled()) {
      fail(r.id, -1, std::string(reaction::failure_name(d.label_failure)), d.label_detail);
      continue;
    }
    bool all = true;
    std::vector<int> used;
    for (std::size_t s = 0; s < d.synthons.size(); ++s) {
      const auto &t = d.templates[s];
      if (!t.ok()) {
        fail(r.id, static_cast<int>(s), std::string(reaction::failure_name(t.failure)), t.detail);
        all = false;
        continue;
      }
      try {
        const chem::MolGraph rebuilt = reaction::apply_semi_template(d.synthons[s], *t.tpl);
        if (!chem::is_isomorphic(rebuilt, r.reactants[t.reactant])) {
          fail(r.id, static_cast<int>(s), "rebuilt_reactant_differs", chem::write_smiles(rebuilt));
          all = false;
        }
      } catch (const reaction::TemplateError &e) {
        fail(r.id, static_cast<int>(s), std::string(reaction::failure_name(e.cause())), e.what());
        all = false;
      }
      used.push_back(t.reactant);
    }
    std::sort(used.begin(), used.end());
    if (all && (used.size() != r.reactants.size()
                || std::adjacent_find(used.begin(), used.end()) != used.end())) {
      fail(r.id, -1, "reactant_set_mismatch", "");
      all = false;
    }
    ok += all;
  }
  const fs::path path = work_dir() / "template_failures.csv";
  std::ofstream(path) << log;
  std::string summary;
  for (const auto &[c, k]: causes)
    summary += (summary.empty() ? "" : ", ") + c + " x" + std::to_string(k);
  const double rate = static_cast<double>(ok) / n;
  return { rate >= 0.95,
           fmt("%zu/%zu reactions rebuilt (%.2f%%, need >= 95%%); causes: %s; log %s; %.1f s", ok, n,
               100.0 * rate, summary.empty() ? "none" : summary.c_str(), path.c_str(),
               seconds_since(t0)) };
}

// 4. Coverage curve. Full-data targets apply only when SEMIRETRO_USPTO50K
// names the dataset; the bundled corpus gets monotonicity and determinism.
Outcome coverage() {
  const auto a = reaction::TemplateLibrary::build(decomposed());
  const auto b = reaction::TemplateLibrary::build(decomposed());
  const auto curve = a.coverage_curve();
  bool monotone = !curve.empty();
  for (std::size_t i = 1; i < curve.size(); ++i) {
    monotone = monotone && curve[i].reaction_coverage >= curve[i - 1].reaction_coverage
               && curve[i].synthon_coverage >= curve[i - 1].synthon_coverage;
  }
  const bool same = a.to_json() == b.to_json() && reaction::coverage_csv(a) == reaction::coverage_csv(b);
  std::string detail = fmt("bundled corpus: %zu distinct semi-templates, top-50 %.2f%%, top-150 "
                           "%.2f%%, monotone=%s, deterministic=%s",
                           a.num_distinct(), 100.0 * a.reaction_coverage(50),
                           100.0 * a.reaction_coverage(150), monotone ? "yes" : "no",
                           same ? "yes" : "no");
  bool pass = monotone && same;
  const char *full = std::getenv("SEMIRETRO_USPTO50K");
  if (full && *full) {
    std::vector<reaction::LoadIssue> issues;
    const auto rx = reaction::load_reactions(reaction::read_records(full, &issues), &issues);
    std::vector<reaction::DecomposedReaction> d;
    for (const auto &r: rx)
      d.push_back(reaction::decompose_reaction(r));
    const auto lib = reaction::TemplateLibrary::build(d);
    const double c150 = lib.reaction_coverage(150), c50 = lib.reaction_coverage(50);
    const bool ok = std::abs(c150 - 0.989) <= 0.010 && std::abs(c50 - 0.926) <= 0.015;
    pass = pass && ok;
    detail += fmt("; full data: top-150 %.2f%% (target 98.9 +- 1.0), top-50 %.2f%% (target 92.6 "
                  "+- 1.5)",
                  100.0 * c150, 100.0 * c50);
  } else {
    detail += "; full-data targets not checked (set SEMIRETRO_USPTO50K to a USPTO-50k CSV)";
  }
  return { pass, detail };
}

// Normwise relative error over every parameter entry.
double full_param_gradcheck(tensor::ParameterStore &store, const std::function<tensor::Tensor()> &f,
                            double h = 1e-6) {
  store.zero_grad();
  {
    tensor::Tape tape;
    tensor::TapeScope scope(tape);
    tape.backward(f());
  }
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    tensor::Tensor p = store.at(i);
    const tensor::Matrix g = p.has_grad() ? p.grad()
                                          : tensor::Matrix::Zero(p.value().rows(), p.value().cols());
    for (Eigen::Index j = 0; j < p.value().size(); ++j) {
      double &x = p.mutable_value().data()[j];
      const double saved = x;
      x = saved + h;
      const double up = f().item();
      x = saved - h;
      const double down = f().item();
      x = saved;
      const double num = (up - down) / (2 * h);
      diff += (g.data()[j] - num) * (g.data()[j] - num);
      na += g.data()[j] * g.data()[j];
      nn += num * num;
    }
  }
  return std::sqrt(diff) / std::max(std::sqrt(na) + std::sqrt(nn), 1e-12);
}

// Zero-initialized biases can leave a pre-activation at exactly 0 (an atom
// whose previous ReLU layer is fully inactive), a point where ReLU has no
// derivative. Random biases move the check to a generic point.
void randomize_biases(tensor::ParameterStore &store, std::mt19937_64 &rng) {
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (store.name(i).ends_with(".b")) {
      tensor::Tensor p = store.at(i);
      p.mutable_value() = testing::random_matrix(p.value().rows(), p.value().cols(), rng, 0.5);
    }
  }
}

// 5. Every operation on random shapes up to 10, then both models' losses
// over every parameter on corpus products with at most 10 atoms.
Outcome gradients() {
  const auto t0 = Clock::now();
  double worst_op = 0.0;
  std::string worst_name;
  int op_checks = 0;
  for (int trial = 0; trial < 12; ++trial) {
    std::mt19937_64 rng(500 + trial);
    for (auto &tc: testing::op_cases(rng, 10)) {
      const double e = testing::gradcheck(tc.f, tc.inputs);
      ++op_checks;
      if (e > worst_op) {
        worst_op = e;
        worst_name = tc.name;
      }
    }
  }

  std::vector<std::size_t> small;
  for (std::size_t i = 0; i < corpus().size() && small.size() < 3; ++i) {
    if (corpus()[i].product.num_atoms() <= 10 && decomposed()[i].labeled()
        && decomposed()[i].synthons.size() <= 2)
      small.push_back(i);
  }
  double worst_ci = 0.0, worst_sc = 0.0;
  std::mt19937_64 rng(77);
  for (std::size_t i: small) {
    const auto &r = corpus()[i];
    const auto &d = decomposed()[i];
    model::CenterModelConfig cc;
    cc.gnn.width = 4;
    cc.gnn.layers = 2;
    cc.gnn.heads = 2;
    cc.hidden = 4;
    model::CenterModel ci(cc, 10 + i);
    randomize_biases(ci.params(), rng);
    const model::GraphFeatures f = model::featurize(r.product);
    const model::GraphBatch g = model::make_batch(f);
    const reaction::CenterLabel labels[] = { d.label };
    worst_ci = std::max(worst_ci, full_param_gradcheck(ci.params(), [&] { return ci.loss(g, labels); }));

    for (bool correcting: { false, true }) {
      model::SynthonModelConfig sc;
      sc.gnn = cc.gnn;
      sc.hidden = 4;
      sc.num_classes = 5;
      sc.class_embedding = 4;
      sc.transformer_layers = 1;
      sc.transformer_heads = 2;
      model::SynthonModel m(sc, 20 + i);
      randomize_biases(m.params(), rng);
      m.set_correcting(correcting);
      const model::PreparedProduct p = model::prepare_product(r.product, d.label, d.synthons);
      std::vector<int> cls(d.synthons.size());
      for (int &c: cls)
        c = std::uniform_int_distribution<int>(1, 5)(rng);
      const model::PreparedProduct *batch[] = { &p };
      const std::vector<int> lab[] = { cls };
      worst_sc = std::max(worst_sc,
                          full_param_gradcheck(m.params(), [&] { return m.loss(batch, lab); }));
    }
  }
  const double t = seconds_since(t0);
  const bool pass = worst_op < 1e-4 && worst_ci < 1e-4 && worst_sc < 1e-4 && small.size() == 3
                    && t < 120.0;
  return { pass, fmt("%d op checks, worst %.2e (%s); center loss worst %.2e, synthon losses "
                     "worst %.2e over %zu products; limit 1e-4; %.1f s (limit 120 s)",
                     op_checks, worst_op, worst_name.c_str(), worst_ci, worst_sc, small.size(), t) };
}

// 6. Both models fit the first 100 reactions.
Outcome overfit() {
  const auto t0 = Clock::now();
  const std::size_t n = 100;
  const std::vector<reaction::DecomposedReaction> data(decomposed().begin(),
                                                       decomposed().begin() + n);
  const std::span<const reaction::Reaction> rx(corpus().data(), n);
  const auto lib = reaction::TemplateLibrary::build(data);
  const auto ci_ex = pipeline::make_ci_examples(data, rx);
  const auto sc_ex = pipeline::make_sc_examples(data, rx, lib);
  const int top1[] = { 1 };
  const int max_epochs = 200;

  model::CenterModelConfig cc;
  cc.gnn.width = 32;
  cc.gnn.layers = 6;
  cc.gnn.heads = 4;
  cc.hidden = 64;
  model::CenterModel ci(cc, 1);
  double ci_acc = 0.0;
  int ci_epochs = 0;
  pipeline::TrainOptions co;
  co.epochs = 150;
  co.batch_size = 16;
  co.max_lr = 1e-3;
  co.seed = 2;
  co.on_epoch = [&](int e, double) { ci_epochs = e + 1; };
  pipeline::train_center_model(ci, ci_ex, co);
  ci_acc = pipeline::center_accuracy(ci, ci_ex, top1)[0];
  const double ci_time = seconds_since(t0);

  model::SynthonModelConfig sc;
  sc.gnn = cc.gnn;
  sc.hidden = 64;
  sc.num_classes = lib.num_classes();
  sc.class_embedding = 32;
  model::SynthonModel m(sc, 3);
  int sc_epochs = 0;
  pipeline::TrainOptions so = co;
  so.seed = 4;
  so.on_epoch = [&](int e, double) { sc_epochs = e + 1; };
  pipeline::train_synthon_model(m, sc_ex, so);
  const double sc_acc = pipeline::synthon_accuracy(m, sc_ex, top1, nullptr)[0];
  const double t = seconds_since(t0);

  const bool pass = ci_acc >= 0.95 && sc_acc >= 0.90 && ci_epochs <= max_epochs
                    && sc_epochs <= max_epochs && t < 600.0;
  return { pass, fmt("center top-1 %.1f%% over %zu products after %d epochs (need >= 95%%), "
                     "synthon top-1 %.1f%% over %zu products after %d epochs (need >= 90%%); "
                     "%.0f s + %.0f s (limit 600 s)",
                     100.0 * ci_acc, ci_ex.size(), ci_epochs, 100.0 * sc_acc, sc_ex.size(),
                     sc_epochs, ci_time, t - ci_time) };
}

// 7a. Oracle predictions through the executable hit every round-trippable
// reaction at rank 1.
Outcome oracle_end_to_end() {
  const fs::path dir = work_dir() / "oracle";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = testing::data_dir() + "/mini_corpus.csv";
  const fs::path log = dir / "cli.log";
  const std::string common = "--out-dir \"" + dir.string() + "\" --train \"" + data
                             + "\" --test \"" + data + "\"";
  int rc = run_cli("mine-templates " + common, log);
  if (rc == 0)
    rc = run_cli("evaluate --oracle " + common, log);
  if (rc == 0)
    rc = run_cli("predict --oracle --input \"" + data + "\" " + common, log);
  if (rc != 0)
    return { false, fmt("semiretro exited with %d; see %s", rc, log.c_str()) };

  // Independent tally from the library file and the written predictions.
  const auto lib = reaction::TemplateLibrary::load((dir / "library.json").string());
  std::map<std::string, std::string> top;
  std::istringstream in(slurp(dir / "predictions.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');)
      f.push_back(x);
    if (f.size() == 4 && f[1] == "1")
      top[f[0]] = f[2];
  }
  int rt = 0, hits = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    if (!pipeline::round_trippable(decomposed()[i], lib))
      continue;
    ++rt;
    const auto it = top.find(corpus()[i].id);
    hits += it != top.end() && it->second == pipeline::reactant_set_key(corpus()[i]);
  }
  const auto j = nlohmann::json::parse(slurp(dir / "evaluate.oracle.json"));
  const double reported = j["metrics"][0]["end_to_end_round_trippable"].get<double>();
  return { rt > 0 && hits == rt && reported == 1.0,
           fmt("predict: %d/%d round-trippable products correct at rank 1; evaluate reports "
               "top-1 %.4f on that subset",
               hits, rt, reported) };
}

// 7b. Joint template ranking against full enumeration on every corpus
// product with at most two synthons, five classes, with and without the
// pair prior.
Outcome joint_ranking() {
  const auto lib = reaction::TemplateLibrary::build(decomposed(), 4);
  const int nc = lib.num_classes();
  std::mt19937_64 rng(13);
  int products = 0, mismatches = 0;
  for (const auto &d: decomposed()) {
    if (!d.labeled() || d.synthons.empty() || d.synthons.size() > 2)
      continue;
    ++products;
    const int ns = static_cast<int>(d.synthons.size());
    std::vector<std::vector<double>> dists(ns, std::vector<double>(nc));
    for (auto &dist: dists) {
      double z = 0.0;
      for (double &v: dist)
        z += (v = tensor::uniform01(rng) + 1e-3);
      for (double &v: dist)
        v /= z;
    }
    const auto links = model::synthon_links(d.synthons);
    for (bool filtered: { false, true }) {
      struct Row {
        std::vector<int> cls;
        double p;
      };
      std::vector<Row> all;
      for (int a = 1; a <= nc; ++a) {
        for (int b = 1; b <= (ns == 2 ? nc : 1); ++b) {
          Row row { { a }, dists[0][a - 1] };
          if (ns == 2) {
            row.cls.push_back(b);
            row.p *= dists[1][b - 1];
          }
          bool keep = true;
          for (const auto &[x, y]: links) {
            if (filtered && lib.pair_count(row.cls[x], row.cls[y]) == 0)
              keep = false;
          }
          if (keep)
            all.push_back(row);
        }
      }
      std::sort(all.begin(), all.end(), [](const Row &x, const Row &y) {
        return x.p != y.p ? x.p > y.p : x.cls < y.cls;
      });
      const int total = ns == 2 ? nc * nc : nc;
      for (int k = 1; k <= total; ++k) {
        const auto got = model::topk_templates(dists, links, k, filtered ? &lib : nullptr);
        const std::size_t want = std::min<std::size_t>(k, all.size());
        bool same = got.size() == want;
        for (std::size_t i = 0; same && i < want; ++i)
          same = got[i].classes == all[i].cls && std::abs(got[i].prob - all[i].p) <= 1e-15;
        mismatches += !same;
      }
    }
  }
  return { products > 0 && mismatches == 0,
           fmt("%d products x k = 1..all x {unfiltered, filtered}: %d mismatches", products,
               mismatches) };
}

// 8. Graph network outputs follow atom relabeling.
Outcome equivariance() {
  tensor::ParameterStore store;
  std::mt19937_64 init(8);
  model::DrgatConfig cfg;
  cfg.width = 16;
  cfg.layers = 4;
  cfg.heads = 4;
  model::DrgatStack stack(store, "g", cfg, init);
  std::mt19937_64 gen(88);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const chem::MolGraph mol = testing::random_molecule(2 + trial % 29, gen);
    const auto perm = testing::random_permutation(mol.num_atoms(), gen);
    const chem::MolGraph moved = testing::relabel(mol, perm, gen);
    const tensor::Matrix a = stack.forward(model::make_batch(model::featurize(mol))).value();
    const tensor::Matrix b = stack.forward(model::make_batch(model::featurize(moved))).value();
    for (int i = 0; i < mol.num_atoms(); ++i)
      worst = std::max(worst, (a.row(i) - b.row(perm[i])).cwiseAbs().maxCoeff());
  }
  return { worst < 1e-9, fmt("100 random graphs, max abs deviation %.2e (limit 1e-9)", worst) };
}

const char *kTinyModel =
    "--width 8 --layers 2 --heads 2 --hidden 8 --class-embedding 16 --transformer-layers 1 "
    "--transformer-heads 2 --batch 32 --ci-epochs 2 --sc-epochs 2 --ci-lr 3e-3 --sc-lr 3e-3";

// Shared small run for criteria 9 and 10: the first 300 corpus reactions.
fs::path small_dataset() {
  const fs::path p = work_dir() / "small.csv";
  std::ifstream in(testing::data_dir() + "/mini_corpus.csv");
  std::ofstream out(p);
  std::string line;
  for (int i = 0; i <= 300 && std::getline(in, line); ++i)
    out << line << "\n";
  return p;
}

// 9. Ablation runs finish and report the same table layout.
Outcome ablations() {
  const fs::path dir = work_dir() / "ablation";
  fs::remove_all(dir);
  const fs::path log = work_dir() / "ablation.log";
  fs::remove(log);
  const std::string base = "--out-dir \"" + dir.string() + "\" --dataset \""
                           + small_dataset().string() + "\" --seed 7 " + kTinyModel;
  const std::string steps[] = {
    "split " + base,
    "mine-templates " + base,
    "train-ci " + base,
    "train-sc " + base,
    "evaluate " + base,
    "evaluate --no-filter " + base,
    "train-sc --no-correcting --sc-model \"" + (dir / "sc_plain.ckpt").string() + "\" " + base,
    "evaluate --no-correcting --sc-model \"" + (dir / "sc_plain.ckpt").string() + "\" " + base,
    "evaluate --no-filter --no-correcting --sc-model \"" + (dir / "sc_plain.ckpt").string()
        + "\" " + base,
  };
  for (const std::string &s: steps) {
    const int rc = run_cli(s, log);
    if (rc != 0)
      return { false, fmt("'%s' exited with %d; see %s", s.substr(0, s.find(' ')).c_str(), rc,
                          log.c_str()) };
  }
  const char *tables[] = { "metrics.csv", "metrics.no_filter.csv", "metrics.no_correcting.csv",
                           "metrics.no_filter.no_correcting.csv" };
  std::string layout;
  std::string summary;
  for (const char *t: tables) {
    const std::string text = slurp(dir / t);
    std::string shape;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    shape = line;
    std::string first;
    while (std::getline(in, line)) {
      shape += "|" + line.substr(0, line.find(','));
      if (first.empty())
        first = line;
    }
    if (layout.empty())
      layout = shape;
    if (shape != layout || text.empty())
      return { false, fmt("%s has a different layout: %s", t, shape.c_str()) };
    summary += fmt("%s top-1 row [%s]; ", t, first.c_str());
  }
  return { layout.find("|1|3|5|10") != std::string::npos,
           "four tables with columns k,ci,sc,end-to-end at k = 1,3,5,10: " + summary };
}

// 10. The whole chain twice with one config gives the same bytes.
Outcome determinism() {
  const fs::path dir = work_dir() / "determinism";
  const fs::path log = work_dir() / "determinism.log";
  fs::remove(log);
  const std::string base = "--out-dir \"" + dir.string() + "\" --dataset \""
                           + small_dataset().string() + "\" --seed 11 " + kTinyModel;
  const char *files[] = { "train.csv", "val.csv", "test.csv", "split.json", "library.json",
                          "coverage.csv", "ci.ckpt", "sc.ckpt", "predictions.csv",
                          "predictions.json" };
  std::map<std::string, std::string> first;
  for (int run = 0; run < 2; ++run) {
    fs::remove_all(dir);
    for (const char *cmd: { "split", "mine-templates", "train-ci", "train-sc" }) {
      const int rc = run_cli(std::string(cmd) + " " + base, log);
      if (rc != 0)
        return { false, fmt("%s exited with %d; see %s", cmd, rc, log.c_str()) };
    }
    const int rc = run_cli("predict --input \"" + (dir / "test.csv").string() + "\" " + base, log);
    if (rc != 0)
      return { false, fmt("predict exited with %d; see %s", rc, log.c_str()) };
    for (const char *f: files) {
      const std::string text = slurp(dir / f);
      if (run == 0) {
        first[f] = text;
      } else if (text != first[f] || text.empty()) {
        return { false, fmt("%s differs between runs", f) };
      }
    }
  }
  return { true, fmt("%zu output files byte-identical across two runs (splits, library, "
                     "checkpoints, predictions)",
                     std::size(files)) };
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char **argv) {
  struct Criterion {
    int id;
    const char *name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
    { 1, "smiles_round_trip", smiles_round_trip },
    { 2, "canonical_invariance", canonical_invariance },
    { 3, "template_round_trip", template_round_trip },
    { 4, "template_coverage", coverage },
    { 5, "gradient_fidelity", gradients },
    { 6, "overfit_sanity", overfit },
    { 7,
      "oracle_end_to_end",
      [] {
        const Outcome a = oracle_end_to_end();
        const Outcome b = joint_ranking();
        return Outcome { a.pass && b.pass, a.detail + "; joint ranking: " + b.detail };
      } },
    { 8, "equivariance", equivariance },
    { 9, "ablation_plumbing", ablations },
    { 10, "determinism", determinism },
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i)
    only.insert(std::atoi(argv[i]));
  int failed = 0, ran = 0;
  for (const Criterion &c: criteria) {
    if (!only.empty() && !only.count(c.id))
      continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = { false, std::string("exception: ") + e.what() };
    }
    failed += !o.pass;
    std::printf("%s  %2d %-21s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
