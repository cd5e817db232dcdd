// Acceptance suite: one criterion per test case, one PASS/FAIL line each.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "odor/autodiff.hpp"
#include "odor/checkpoint.hpp"
#include "odor/graph_algo.hpp"
#include "odor/loss.hpp"
#include "odor/metrics.hpp"
#include "odor/smiles.hpp"
#include "odor/train.hpp"
#include "support/helpers.hpp"

using namespace odor;
namespace fs = std::filesystem;

#ifndef ODOR_CLI_PATH
#define ODOR_CLI_PATH "odorgat"
#endif

namespace {

void report(int number, const char* name, bool ok) {
  std::printf("[criterion %2d] %-28s %s\n", number, name, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", number, " (", name, ")");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

FeatureConfig small_features() {
  FeatureConfig f;
  f.morgan_bits = 64;
  f.topo_bits = 64;
  return f;
}

ModelConfig small_model(const FeatureConfig& features, int labels) {
  ModelConfig m;
  m.heads = 4;
  m.head_dim = 4;
  m.final_dim = 8;
  m.global_hidden = 16;
  m.global_out = 8;
  m.fusion_hidden = 16;
  m.labels = labels;
  m.node_dim = features.atom_dim();
  m.edge_dim = features.bond_dim();
  m.global_dim = features.global_dim();
  return m;
}

TrainConfig synthetic_train_config(int epochs, uint64_t seed) {
  TrainConfig config;
  config.epochs = epochs;
  config.batch_size = 32;
  config.seed = seed;
  config.learning_rate = 3e-3;
  config.eval_every = 10;
  config.loss.alpha1_ramp_epochs = epochs;
  config.features.morgan_bits = 256;
  config.features.topo_bits = 256;
  config.model.heads = 4;
  config.model.head_dim = 8;
  config.model.final_dim = 16;
  config.model.global_hidden = 32;
  config.model.global_out = 16;
  config.model.fusion_hidden = 32;
  return config;
}

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / ("odor_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

void write_csv(const fs::path& path, const std::vector<DatasetRecord>& records) {
  std::ofstream out(path);
  out << "smiles,labels\n";
  for (const auto& rec : records) {
    out << rec.smiles << ",";
    for (size_t i = 0; i < rec.labels.size(); ++i) out << (i ? ";" : "") << rec.labels[i];
    out << "\n";
  }
}

}  // namespace

TEST_CASE("criterion 1: gradient fidelity") {
  auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst_primitive = 0.0;
  auto probe = [&](double err) { worst_primitive = std::max(worst_primitive, err); };

  {
    Tensor a = test::random_safe_tensor(rng, {3, 4});
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) {
      return matmul(t, x, Tensor::from({4, 2}, {1, -2, .5, 3, -1, 2, .25, -3}));
    }));
    Tensor b = test::random_safe_tensor(rng, {3, 4});
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) { return add(t, x, b); }));
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) { return mul(t, x, b); }));
    Tensor row = test::random_safe_tensor(rng, {4});
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) { return add_rowvec(t, x, row); }));
    Tensor s = test::random_safe_tensor(rng, {3});
    probe(test::fd_check_primitive(s, [&](Tape& t, const Tensor& x) { return scale_rows(t, a, x); }));
    Tensor c = test::random_safe_tensor(rng, {3, 2});
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) { return concat(t, {x, c}, 1); }));
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) { return slice(t, x, 0, 1, 2); }));
    probe(test::fd_check_primitive(a, [](Tape& t, const Tensor& x) { return exp(t, x); }));
    probe(test::fd_check_primitive(a, [](Tape& t, const Tensor& x) { return sigmoid(t, x); }));
    probe(test::fd_check_primitive(a, [](Tape& t, const Tensor& x) { return relu(t, x); }));
    probe(test::fd_check_primitive(a, [](Tape& t, const Tensor& x) { return leaky_relu(t, x, 0.2); }));
    Tensor pos = test::random_safe_tensor(rng, {3, 4}, 0.2, 3.0);
    probe(test::fd_check_primitive(pos, [](Tape& t, const Tensor& x) { return log(t, x); }));
    probe(test::fd_check_primitive(pos, [](Tape& t, const Tensor& x) { return pow_const(t, x, 2.0); }));
    std::vector<int> rows = {2, 0, 1, 1};
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) { return gather_rows(t, x, rows); }));
    std::vector<int> ids = {1, 0, 1};
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) { return segment_sum(t, x, ids, 2); }));
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) { return segment_mean(t, x, ids, 2); }));
    probe(test::fd_check_primitive(a, [&](Tape& t, const Tensor& x) { return segment_max(t, x, ids, 2); }));
    Tensor scores = test::random_safe_tensor(rng, {6});
    std::vector<int> seg = {0, 0, 1, 1, 1, 2};
    probe(test::fd_check_primitive(scores, [&](Tape& t, const Tensor& x) {
      return segment_softmax(t, x, seg, 3);
    }));
    Tensor logits = test::random_safe_tensor(rng, {3, 4});
    std::vector<double> ys(12);
    for (double& y : ys) y = rng.below(2);
    Tensor y = Tensor::from({3, 4}, ys);
    probe(test::fd_check_primitive(logits, [&](Tape& t, const Tensor& x) {
      return bce_with_logits(t, x, y);
    }));
    Tensor bn_in = test::random_safe_tensor(rng, {5, 3});
    Tensor gamma = test::random_safe_tensor(rng, {3}, 0.5, 1.5);
    Tensor beta = test::random_safe_tensor(rng, {3});
    probe(test::fd_check_primitive(bn_in, [&](Tape& t, const Tensor& x) {
      BatchNormState state;
      state.init(3);
      return batch_norm(t, x, gamma, beta, state, true);
    }));
    BatchNormState frozen;
    frozen.init(3);
    probe(test::fd_check_primitive(bn_in, [&](Tape& t, const Tensor& x) {
      return batch_norm(t, x, gamma, beta, frozen, false);
    }));
  }

  // End-to-end: full-coordinate check of the whole model loss on a small
  // molecule, h = 1e-4.
  FeatureConfig features = small_features();
  ModelConfig model_config = small_model(features, 8);
  ModelParams params = ModelParams::init(model_config, 42);
  Rng mol_rng(1);
  MolecularGraph mol = parse_smiles(test::random_small_smiles(mol_rng, 6));
  REQUIRE(mol.atom_count() <= 6);
  FeatureSet fset = featurize_molecule(mol, features);
  fset.label_vector = {1, 0, 0, 1, 0, 1, 0, 0};
  std::vector<FeatureSet> sets = {fset};
  BatchGraph batch = make_batch(sets);
  LossConfig loss_config;
  std::vector<Tensor> trainable = params.all_parameters();
  double end_to_end = grad_check(
      trainable,
      [&](Tape& t) {
        Tensor logits = model_forward(t, batch, params, /*training=*/true);
        Tensor targets = Tensor::from({1, 8}, fset.label_vector);
        return total_loss(t, logits, targets, 5, loss_config, params);
      },
      1e-4);

  double elapsed = seconds_since(start);
  std::printf("    per-primitive max rel err: %.3g, end-to-end: %.3g, %.1fs\n", worst_primitive,
              end_to_end, elapsed);
  report(1, "gradient fidelity", worst_primitive < 1e-6 && end_to_end < 1e-3 && elapsed < 30.0);
}

TEST_CASE("criterion 2: attention normalization") {
  FeatureConfig features = small_features();
  ModelConfig model_config = small_model(features, 6);
  ModelParams params = ModelParams::init(model_config, 77);
  Rng rng(102);
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FeatureSet> sets;
    int graphs = 2 + static_cast<int>(rng.below(4));
    for (int g = 0; g < graphs; ++g) {
      FeatureSet fset = featurize_molecule(parse_smiles(test::random_smiles(rng)), features);
      fset.label_vector.assign(6, 0.0);
      sets.push_back(std::move(fset));
    }
    BatchGraph batch = make_batch(sets);
    AttentionTrace trace;
    Tape tape;
    model_forward(tape, batch, params, /*training=*/false, {}, &trace);
    for (const auto& [ids, alpha] : trace.neighborhood) {
      std::vector<double> sums(batch.num_nodes, 0.0);
      for (size_t e = 0; e < ids.size(); ++e) sums[ids[e]] += alpha.values()[e];
      for (double s : sums) ok &= std::abs(s - 1.0) <= 1e-12;
    }
    for (const auto& [ids, alpha] : trace.readout) {
      std::vector<double> sums(batch.num_graphs, 0.0);
      for (size_t i = 0; i < ids.size(); ++i) sums[ids[i]] += alpha.values()[i];
      for (double s : sums) ok &= std::abs(s - 1.0) <= 1e-12;
    }
  }
  report(2, "attention normalization", ok);
}

TEST_CASE("criterion 3: permutation invariance") {
  FeatureConfig features = small_features();
  ModelConfig model_config = small_model(features, 6);
  ModelParams params = ModelParams::init(model_config, 55);
  Rng rng(103);
  bool ok = true;
  for (int i = 0; i < 100; ++i) {
    MolecularGraph g = parse_smiles(test::random_smiles(rng));
    FeatureSet base_set = featurize_molecule(g, features);
    base_set.label_vector.assign(6, 0.0);
    std::vector<FeatureSet> base = {base_set};
    Tape t0;
    Tensor ref = model_forward(t0, make_batch(base), params, false);
    auto morgan = morgan_fingerprint(g, features.morgan_radius, features.morgan_bits);
    auto maccs = maccs_fingerprint(g, features.keys());
    auto topo = topological_fingerprint(g, features.topo_bits);

    for (int trial = 0; trial < 5; ++trial) {
      MolecularGraph h = test::permute_graph(g, test::random_permutation(g.atom_count(), rng), rng);
      ok &= morgan_fingerprint(h, features.morgan_radius, features.morgan_bits) == morgan;
      ok &= maccs_fingerprint(h, features.keys()) == maccs;
      ok &= topological_fingerprint(h, features.topo_bits) == topo;
      FeatureSet pset = featurize_molecule(h, features);
      pset.label_vector.assign(6, 0.0);
      std::vector<FeatureSet> perm = {pset};
      Tape t1;
      Tensor out = model_forward(t1, make_batch(perm), params, false);
      for (int64_t k = 0; k < ref.size(); ++k)
        ok &= std::abs(ref.values()[k] - out.values()[k]) <= 1e-8;
    }
  }
  report(3, "permutation invariance", ok);
}

TEST_CASE("criterion 4: loss identities") {
  Rng rng(104);
  bool ok = true;
  std::vector<double> xs(10000), ys(10000);
  for (size_t i = 0; i < xs.size(); ++i) {
    xs[i] = (rng.uniform() - 0.5) * 40.0;
    ys[i] = rng.below(2);
  }
  Tensor x = Tensor::from({100, 100}, xs);
  Tensor y = Tensor::from({100, 100}, ys);
  {
    Tape t;
    Tensor reduced = focal(t, x, y, 1.0, 0.0);
    Tensor base = bce(t, x, y);
    for (int64_t i = 0; i < reduced.size(); ++i)
      ok &= std::abs(reduced.values()[i] - base.values()[i]) <= 1e-12;
  }
  {
    LossConfig zero, one;
    zero.alpha1_start = zero.alpha1_end = 0.0;
    one.alpha1_start = one.alpha1_end = 1.0;
    Tape t1, t2, t3, t4;
    ok &= adaptive_loss(t1, x, y, 3, zero).item() == mean(t2, bce(t2, x, y)).item();
    ok &= adaptive_loss(t3, x, y, 3, one).item() ==
          mean(t4, focal(t4, x, y, one.alpha, one.gamma)).item();
  }
  {
    Tape t;
    Tensor f = focal(t, x, y, 0.5, 2.0);
    Tensor b = bce(t, x, y);
    for (int64_t i = 0; i < f.size(); ++i)
      ok &= f.values()[i] <= 0.5 * b.values()[i] + 1e-15;
  }
  for (double logit : {500.0, -500.0}) {
    for (double target : {0.0, 1.0}) {
      Tape t;
      ok &= std::isfinite(bce(t, Tensor::scalar(logit), Tensor::scalar(target)).item());
    }
  }
  report(4, "loss identities", ok);
}

TEST_CASE("criterion 5: metric oracle") {
  Rng rng(105);
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng.below(60));
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.below(10)) / 9.0;  // ties on purpose
      labels[i] = static_cast<int>(rng.below(2));
    }
    labels[0] = 1;
    labels[n - 1] = 0;
    ok &= auroc(scores, labels) == test::auroc_bruteforce(scores, labels);
  }
  struct Case {
    int tp, fp, fn, tn;
    double expected;
  };
  const Case cases[] = {
      {1, 0, 0, 1, 1.0},         {1, 1, 0, 1, 2.0 / 3.0},  {1, 0, 1, 1, 2.0 / 3.0},
      {1, 1, 1, 0, 0.5},         {2, 0, 0, 2, 1.0},        {2, 1, 0, 1, 0.8},
      {2, 0, 1, 1, 0.8},         {2, 1, 1, 0, 2.0 / 3.0},  {3, 2, 1, 0, 2.0 / 3.0},
      {0, 1, 1, 2, 0.0},         {0, 0, 2, 2, 0.0},        {4, 0, 0, 0, 1.0},
      {1, 3, 0, 0, 0.4},         {1, 0, 3, 0, 0.4},        {5, 1, 1, 1, 10.0 / 12.0},
      {3, 3, 3, 3, 0.5},         {2, 2, 0, 0, 2.0 / 3.0},  {0, 4, 1, 0, 0.0},
      {6, 1, 0, 1, 12.0 / 13.0}, {1, 1, 2, 4, 0.4},
  };
  for (const Case& c : cases) {
    std::vector<double> scores, labels;
    auto push = [&](double score, double label, int count) {
      for (int i = 0; i < count; ++i) {
        scores.push_back(score);
        labels.push_back(label);
      }
    };
    push(0.9, 1, c.tp);
    push(0.9, 0, c.fp);
    push(0.1, 1, c.fn);
    push(0.1, 0, c.tn);
    int rows = c.tp + c.fp + c.fn + c.tn;
    ok &= std::abs(f1_macro(scores, labels, rows, 1) - c.expected) <= 1e-12;
  }
  report(5, "metric oracle", ok);
}

TEST_CASE("criterion 6: synthetic overfit") {
  auto start = std::chrono::steady_clock::now();
  auto records = test::synthetic_dataset(32, 20240601);
  TrainConfig config = synthetic_train_config(/*epochs=*/500, /*seed=*/3);
  TrainOutput out = train_model(config, records);
  auto [train_records, test_records] = split_dataset(records, config.split_fraction, config.seed);
  MetricReport report_train = evaluate_model(out.params, config.features, out.vocabulary,
                                             train_records, ElementTable::builtin());
  double elapsed = seconds_since(start);
  std::printf("    train macro F1 %.4f after %d epochs, %.1fs\n", report_train.macro_f1,
              config.epochs, elapsed);
  report(6, "synthetic overfit", report_train.macro_f1 >= 0.95 && elapsed < 300.0);
}

TEST_CASE("criterion 7: synthetic generalization") {
  auto start = std::chrono::steady_clock::now();
  auto records = test::synthetic_dataset(200, 20240602);
  TrainConfig config = synthetic_train_config(/*epochs=*/200, /*seed=*/9);
  TrainOutput out = train_model(config, records);
  REQUIRE(out.final_test_metrics.has_value());
  double elapsed = seconds_since(start);
  std::printf("    test mean AUROC %.4f, macro F1 %.4f, %.1fs\n",
              out.final_test_metrics->mean_auroc, out.final_test_metrics->macro_f1, elapsed);
  report(7, "synthetic generalization",
         out.final_test_metrics->mean_auroc >= 0.95 && out.final_test_metrics->macro_f1 >= 0.8 &&
             elapsed < 600.0);
}

TEST_CASE("criterion 8: parser corpus") {
  struct Expected {
    const char* smiles;
    int atoms, bonds, rings;
  };
  // Hand-verified heavy-atom, bond, and basis-ring counts.
  const Expected corpus[] = {
      {"C", 1, 0, 0},
      {"CC", 2, 1, 0},
      {"CCO", 3, 2, 0},
      {"OCC", 3, 2, 0},
      {"C=C", 2, 1, 0},
      {"C#N", 2, 1, 0},
      {"CC(=O)O", 4, 3, 0},
      {"CC(=O)C", 4, 3, 0},
      {"CCN", 3, 2, 0},
      {"CCCl", 3, 2, 0},
      {"C1CC1", 3, 3, 1},
      {"C1CCC1", 4, 4, 1},
      {"C1CCCC1", 5, 5, 1},
      {"C1CCCCC1", 6, 6, 1},
      {"c1ccccc1", 6, 6, 1},
      {"C1=CC=CC=C1", 6, 6, 1},
      {"Cc1ccccc1", 7, 7, 1},
      {"c1ccc2ccccc2c1", 10, 11, 2},
      {"C1CC2CCC1CC2", 8, 9, 2},
      {"CC(C)C", 4, 3, 0},
      {"CC(C)(C)C", 5, 4, 0},
      {"OC(=O)c1ccccc1", 9, 9, 1},
      {"CCOC(=O)C", 6, 5, 0},
      {"CC#CC", 4, 3, 0},
      {"CCCCCCCC", 8, 7, 0},
      {"C(F)(F)F", 4, 3, 0},
      {"ClC(Cl)Cl", 4, 3, 0},
      {"C[N+](=O)[O-]", 4, 3, 0},
      {"CS(=O)(=O)C", 5, 4, 0},
      {"c1ccncc1", 6, 6, 1},
      {"c1cc[nH]c1", 5, 5, 1},
      {"c1ccoc1", 5, 5, 1},
      {"c1ccsc1", 5, 5, 1},
      {"CC(C)Cl.O", 5, 3, 0},
      {"OCCO", 4, 3, 0},
      {"NCCN", 4, 3, 0},
      {"CCS", 3, 2, 0},
      {"CSC", 3, 2, 0},
      {"CC=CC", 4, 3, 0},
      {"CC(=O)N", 4, 3, 0},
      {"CC(=O)NC", 5, 4, 0},
      {"N#Cc1ccccc1", 8, 8, 1},
      {"OCc1ccccc1", 8, 8, 1},
      {"Cc1ccc(C)cc1", 8, 8, 1},
      {"c1ccc(cc1)c1ccccc1", 12, 13, 2},
      {"C1CCCCC1C1CCCCC1", 12, 13, 2},
      {"CC(Br)C", 4, 3, 0},
      {"CCI", 3, 2, 0},
      {"CCCBr", 4, 3, 0},
      {"C1OC1", 3, 3, 1},
  };
  static_assert(std::size(corpus) == 50);
  bool ok = true;
  for (const Expected& e : corpus) {
    try {
      MolecularGraph g = parse_smiles(e.smiles);
      bool match = g.atom_count() == e.atoms && g.bond_count() == e.bonds &&
                   static_cast<int>(g.rings.size()) == e.rings;
      if (!match)
        std::printf("    mismatch %s: got %d/%d/%zu\n", e.smiles, g.atom_count(), g.bond_count(),
                    g.rings.size());
      ok &= match;
    } catch (const std::exception& ex) {
      std::printf("    unexpected parse failure %s: %s\n", e.smiles, ex.what());
      ok = false;
    }
  }

  struct Malformed {
    const char* smiles;
    SmilesErrorKind kind;
  };
  const Malformed malformed[] = {
      {"", SmilesErrorKind::kEmptyInput},
      {"C1CC", SmilesErrorKind::kUnbalancedRingClosure},
      {"C(C", SmilesErrorKind::kUnbalancedParenthesis},
      {"CC)C", SmilesErrorKind::kUnbalancedParenthesis},
      {"CQ", SmilesErrorKind::kUnknownElement},
      {"[Zz]C", SmilesErrorKind::kUnknownElement},
      {"C(C)(C)(C)(C)C", SmilesErrorKind::kValenceViolation},
      {"cc", SmilesErrorKind::kAromaticityError},
      {"C12CC12", SmilesErrorKind::kDuplicateBond},
      {"CC=", SmilesErrorKind::kSyntax},
  };
  static_assert(std::size(malformed) == 10);
  for (const Malformed& m : malformed) {
    try {
      parse_smiles(m.smiles);
      std::printf("    malformed input parsed: '%s'\n", m.smiles);
      ok = false;
    } catch (const SmilesError& e) {
      if (e.kind != m.kind) {
        std::printf("    wrong error class for '%s'\n", m.smiles);
        ok = false;
      }
    }
  }
  report(8, "parser corpus", ok);
}

TEST_CASE("criterion 9: determinism and checkpoint round trip") {
  auto records = test::synthetic_dataset(24, 20240603);
  TrainConfig config = synthetic_train_config(/*epochs=*/5, /*seed=*/13);
  TrainOutput a = train_model(config, records);
  TrainOutput b = train_model(config, records);
  bool ok = a.log_lines == b.log_lines;

  std::vector<std::string> probe;
  for (const auto& rec : test::synthetic_dataset(50, 20240604)) probe.push_back(rec.smiles);
  auto before =
      predict_smiles(a.params, config.features, a.vocabulary, probe, ElementTable::builtin());

  fs::path dir = temp_dir();
  fs::path ckpt = dir / "roundtrip.ckpt";
  save_checkpoint(ckpt.string(), a.params, config.features, ElementTable::builtin(),
                  a.vocabulary.names(), config.epochs);
  LoadedCheckpoint loaded = load_checkpoint(ckpt.string());
  auto vocab = LabelVocabulary::from_names(loaded.vocabulary);
  auto after = predict_smiles(loaded.params, loaded.features, vocab, probe, loaded.elements);
  ok &= before.size() == after.size();
  for (size_t i = 0; i < before.size() && ok; ++i) {
    ok &= before[i].ok == after[i].ok;
    ok &= before[i].descriptor_probs.size() == after[i].descriptor_probs.size();
    for (size_t k = 0; k < before[i].descriptor_probs.size(); ++k) {
      ok &= before[i].descriptor_probs[k].first == after[i].descriptor_probs[k].first;
      ok &= before[i].descriptor_probs[k].second == after[i].descriptor_probs[k].second;
    }
  }
  fs::remove_all(dir);
  report(9, "determinism + round trip", ok);
}

TEST_CASE("criterion 10: conditional reproduction harness") {
  fs::path dir = temp_dir();
  fs::path csv = dir / "dataset.csv";
  write_csv(csv, test::synthetic_dataset(60, 20240605));
  fs::path config_path = dir / "config.json";
  {
    std::ofstream cfg(config_path);
    cfg << R"({"epochs": 4, "batch_size": 16, "eval_every": 2,
               "features": {"morgan_bits": 128, "topo_bits": 128},
               "model": {"head_dim": 4, "final_dim": 8, "global_hidden": 16,
                          "global_out": 8, "fusion_hidden": 16}})";
  }
  std::string cli = ODOR_CLI_PATH;
  auto run = [&](const std::string& args, const fs::path& log) {
    std::string cmd = cli + " " + args + " > " + log.string() + " 2>&1";
    return std::system(cmd.c_str());
  };
  bool ok = true;

  ok &= run("train --data " + csv.string() + " --config " + config_path.string() + " --out " +
                (dir / "run").string() + " --seed 5",
            dir / "train.log") == 0;
  ok &= fs::exists(dir / "run/final.ckpt");
  ok &= fs::exists(dir / "run/best.ckpt");
  ok &= fs::exists(dir / "run/train_log.jsonl");

  ok &= run("eval --checkpoint " + (dir / "run/final.ckpt").string() + " --data " + csv.string(),
            dir / "eval.log") == 0;
  {
    std::ifstream log(dir / "eval.log");
    std::stringstream buf;
    buf << log.rdbuf();
    // Table I format: "AUROC 0.xxxx  F1 0.xxxx".
    ok &= buf.str().find("AUROC 0.") != std::string::npos;
    ok &= buf.str().find("F1 0.") != std::string::npos;
  }

  ok &= run("stats --data " + csv.string() + " --json " + (dir / "stats.json").string(),
            dir / "stats.log") == 0;
  {
    std::ifstream json_in(dir / "stats.json");
    std::stringstream buf;
    buf << json_in.rdbuf();
    ok &= buf.str().find("fraction_1_to_6") != std::string::npos;
    ok &= buf.str().find("labels_per_molecule") != std::string::npos;
  }

  // With the paper's dataset supplied, check Fig. 3's 1-6 descriptor share.
  if (const char* paper_csv = std::getenv("ODOR_PAPER_DATASET")) {
    Dataset ds = load_dataset(paper_csv, /*require_labels=*/true);
    DatasetStats stats = dataset_stats(ds.records);
    std::printf("    paper dataset fraction_1_to_6 = %.4f\n", stats.fraction_1_to_6);
    ok &= std::abs(stats.fraction_1_to_6 - 0.80) <= 0.05;
  } else {
    std::printf("    paper dataset not supplied; label-density comparison skipped\n");
  }
  fs::remove_all(dir);
  report(10, "conditional harness", ok);
}
