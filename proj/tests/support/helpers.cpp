#include "helpers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "odor/featurize.hpp"
#include "odor/smiles.hpp"

namespace odor::test {

namespace {

// Tail fragments appended to a carbon chain; each stays valid SMILES.
const std::vector<std::string> kTails = {
    "O",        // hydroxyl
    "C(=O)C",   // ketone / carbonyl
    "C(=O)O",   // carboxylic acid
    "C(=O)OC",  // ester
    "N",        // primary amine
    "C#N",      // nitrile
    "Cl",       // halogen
    "Br",       // halogen
    "C=C",      // alkene
    "C#C",      // alkyne
    "S",        // thiol
    "OC",       // ether
    "c1ccccc1", // aromatic ring
    "C(=O)N",   // amide
};

// Head fragments prepended to the chain.
const std::vector<std::string> kHeads = {
    "O", "N", "Cl", "N#C", "C=C", "OC(=O)", "CC(=O)", "c1ccccc1", "",
};

}  // namespace

std::string random_smiles(Rng& rng) {
  size_t before = 1 + rng.below(3);  // chain carbons before a possible branch
  size_t after = rng.below(3);
  std::string head = kHeads[rng.below(kHeads.size())];
  std::string tail = kTails[rng.below(kTails.size())];
  std::string s = head + std::string(before, 'C');
  if (rng.below(4) == 0) s += "(" + kTails[rng.below(kTails.size())] + ")";
  s += std::string(after, 'C') + tail;
  return s;
}

std::string random_small_smiles(Rng& rng, int max_atoms) {
  for (;;) {
    std::string s = random_smiles(rng);
    if (parse_smiles(s).atom_count() <= max_atoms) return s;
  }
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  return perm;
}

MolecularGraph permute_graph(const MolecularGraph& g, const std::vector<int>& perm, Rng& rng) {
  MolecularGraph out;
  out.elements = g.elements;
  out.atoms.resize(g.atoms.size());
  for (int i = 0; i < g.atom_count(); ++i) out.atoms[perm[i]] = g.atoms[i];
  out.bonds = g.bonds;
  for (BondEdge& b : out.bonds) {
    b.a = perm[b.a];
    b.b = perm[b.b];
  }
  rng.shuffle(out.bonds);
  out.rebuild_adjacency();
  for (const auto& ring : g.rings) {
    std::vector<int> mapped;
    for (int a : ring) mapped.push_back(perm[a]);
    out.rings.push_back(std::move(mapped));
  }
  return out;
}

namespace {

bool mapping_valid(const SmartsPattern& p, const MolecularGraph& g, const std::vector<int>& map) {
  for (int i = 0; i < p.atom_count(); ++i)
    if (!p.atoms[i].matches(g, map[i])) return false;
  for (const auto& edge : p.bonds) {
    int bond = g.find_bond(map[edge.a], map[edge.b]);
    if (bond < 0 || !edge.pred.matches(g.bonds[bond])) return false;
  }
  return true;
}

void enumerate(const SmartsPattern& p, const MolecularGraph& g, std::vector<int>& map,
               std::vector<bool>& used, size_t depth, std::vector<std::vector<int>>& out) {
  if (depth == map.size()) {
    if (mapping_valid(p, g, map)) out.push_back(map);
    return;
  }
  for (int cand = 0; cand < g.atom_count(); ++cand) {
    if (used[cand]) continue;
    used[cand] = true;
    map[depth] = cand;
    enumerate(p, g, map, used, depth + 1, out);
    used[cand] = false;
  }
}

}  // namespace

std::vector<std::vector<int>> brute_force_matches(const SmartsPattern& p, const MolecularGraph& g) {
  if (p.atom_count() > g.atom_count()) return {};
  std::vector<int> map(p.atom_count(), -1);
  std::vector<bool> used(g.atom_count(), false);
  std::vector<std::vector<int>> out;
  enumerate(p, g, map, used, 0, out);
  return out;
}

double auroc_bruteforce(const std::vector<double>& scores, const std::vector<int>& labels) {
  double concordant = 0.0, tied = 0.0;
  int64_t positives = 0, negatives = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    ++positives;
    for (size_t j = 0; j < labels.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) concordant += 1.0;
      else if (scores[i] == scores[j]) tied += 1.0;
    }
  }
  negatives = static_cast<int64_t>(labels.size()) - positives;
  if (positives == 0 || negatives == 0) throw std::runtime_error("degenerate oracle input");
  return (concordant + 0.5 * tied) / (static_cast<double>(positives) * negatives);
}

const std::vector<std::string>& synthetic_label_names() {
  static const std::vector<std::string> names = {
      "hydroxyl", "carbonyl", "carboxylic_acid", "amine_primary",
      "nitrile",  "halogen",  "aromatic_ring",   "alkene",
  };
  return names;
}

std::vector<DatasetRecord> synthetic_dataset(int count, uint64_t seed) {
  std::vector<PatternGroup> groups;
  for (const auto& name : synthetic_label_names()) {
    auto it = std::find_if(builtin_pattern_groups().begin(), builtin_pattern_groups().end(),
                           [&](const PatternGroup& g) { return g.name == name; });
    if (it == builtin_pattern_groups().end())
      throw std::runtime_error("missing builtin pattern group: " + name);
    groups.push_back(*it);
  }

  Rng rng(seed);
  std::set<std::string> seen;
  std::vector<DatasetRecord> records;
  while (static_cast<int>(records.size()) < count) {
    std::string smiles = random_smiles(rng);
    if (!seen.insert(smiles).second) continue;
    MolecularGraph graph = parse_smiles(smiles);
    auto bits = functional_group_vector(graph, groups);
    DatasetRecord rec;
    rec.smiles = smiles;
    for (size_t g = 0; g < bits.size(); ++g)
      if (bits[g] > 0.5) rec.labels.push_back(groups[g].name);
    if (rec.labels.empty()) continue;  // training rows need at least one label
    records.push_back(std::move(rec));
  }
  return records;
}

Tensor random_safe_tensor(Rng& rng, std::vector<int> shape, double lo, double hi) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  std::vector<double> v(n);
  for (double& x : v) {
    do {
      x = lo + (hi - lo) * rng.uniform();
    } while (std::abs(x) < 1e-2);
  }
  return Tensor::parameter("x", std::move(shape), std::move(v));
}

double fd_check_primitive(Tensor& input, const std::function<Tensor(Tape&, const Tensor&)>& op,
                          double h) {
  input.zero_grad();
  Tape tape;
  Tensor out = op(tape, input);
  std::vector<double> weights(out.size());
  for (int64_t i = 0; i < out.size(); ++i) weights[i] = 0.3 + 0.1 * static_cast<double>(i % 7);
  Tensor w = Tensor::from(out.shape(), weights);
  Tensor loss = sum(tape, mul(tape, out, w));
  tape.backward(loss);
  std::vector<double> analytic = input.grad();

  double max_rel = 0.0;
  for (size_t c = 0; c < input.values().size(); ++c) {
    double saved = input.values()[c];
    auto eval = [&](double v) {
      input.values()[c] = v;
      Tape t2;
      Tensor o = op(t2, input);
      Tensor l = sum(t2, mul(t2, o, Tensor::from(o.shape(), weights)));
      input.values()[c] = saved;
      return l.item();
    };
    double numeric = (eval(saved + h) - eval(saved - h)) / (2 * h);
    double rel = std::abs(analytic[c] - numeric) /
                 std::max({std::abs(analytic[c]), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace odor::test
