#include <algorithm>
#include <map>

#include "odor/featurize.hpp"
#include "odor/graph_algo.hpp"
#include "odor/hash.hpp"

namespace odor {

namespace {

uint64_t bond_class(BondOrder order) {
  switch (order) {
    case BondOrder::kSingle: return 1;
    case BondOrder::kDouble: return 2;
    case BondOrder::kTriple: return 3;
    case BondOrder::kAromatic: return 4;
  }
  return 1;
}

uint64_t initial_invariant(const MolecularGraph& g, int atom) {
  const AtomNode& a = g.atoms[atom];
  return Hash64()
      .mix(g.element(atom).atomic_number)
      .mix(g.degree(atom))
      .mix_signed(a.formal_charge)
      .mix(a.implicit_h)
      .mix(a.in_ring ? 1 : 0)
      .mix(a.aromatic ? 1 : 0)
      .digest();
}

}  // namespace

// ECFP-style circular fingerprint: every atom invariant from every round
// (including round 0) sets bit invariant % bits.
std::vector<uint8_t> morgan_fingerprint(const MolecularGraph& graph, int radius, int bits) {
  std::vector<uint8_t> fp(bits, 0);
  int n = graph.atom_count();
  std::vector<uint64_t> inv(n);
  for (int i = 0; i < n; ++i) {
    inv[i] = initial_invariant(graph, i);
    fp[inv[i] % bits] = 1;
  }
  for (int round = 1; round <= radius; ++round) {
    std::vector<uint64_t> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<uint64_t, uint64_t>> env;
      for (int bi : graph.adjacency[i])
        env.emplace_back(bond_class(graph.bonds[bi].order), inv[graph.bonds[bi].other(i)]);
      std::sort(env.begin(), env.end());
      Hash64 h;
      h.mix(inv[i]);
      for (auto& [cls, neighbor] : env) h.mix(cls).mix(neighbor);
      next[i] = h.digest();
      fp[next[i] % bits] = 1;
    }
    inv = std::move(next);
  }
  return fp;
}

std::vector<uint8_t> maccs_fingerprint(const MolecularGraph& graph,
                                       const std::vector<MaccsKeyLine>& keys) {
  std::vector<uint8_t> fp(166, 0);
  // Lines sharing an index OR together; counts are per line.
  for (const MaccsKeyLine& key : keys) {
    if (fp[key.index - 1]) continue;
    if (count_distinct_matches(key.pattern, graph) >= key.min_count) fp[key.index - 1] = 1;
  }
  return fp;
}

// One bit per (sorted element pair, hop distance) over all connected atom
// pairs, encoding the molecular distance matrix.
std::vector<uint8_t> topological_fingerprint(const MolecularGraph& graph, int bits) {
  std::vector<uint8_t> fp(bits, 0);
  auto dist = shortest_paths(graph);
  int n = graph.atom_count();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (dist[i][j] < 1) continue;  // disconnected pairs contribute nothing
      uint64_t zi = graph.element(i).atomic_number;
      uint64_t zj = graph.element(j).atomic_number;
      uint64_t h = Hash64()
                       .mix(std::min(zi, zj))
                       .mix(std::max(zi, zj))
                       .mix(static_cast<uint64_t>(dist[i][j]))
                       .digest();
      fp[h % bits] = 1;
    }
  }
  return fp;
}

std::vector<double> global_features(const MolecularGraph& graph, const FeatureConfig& config) {
  std::vector<double> out;
  out.reserve(config.global_dim());
  if (!config.fingerprint_enabled) {
    out.assign(config.global_dim(), 0.0);
    return out;
  }
  for (uint8_t b : morgan_fingerprint(graph, config.morgan_radius, config.morgan_bits))
    out.push_back(b);
  for (uint8_t b : maccs_fingerprint(graph, config.keys())) out.push_back(b);
  for (uint8_t b : topological_fingerprint(graph, config.topo_bits)) out.push_back(b);
  return out;
}

}  // namespace odor
