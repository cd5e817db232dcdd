#include "odor/graph_algo.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>

namespace odor {

namespace {

struct BfsTree {
  std::vector<int> dist;
  std::vector<int> parent_bond;  // bond used to reach each atom, -1 at root
  std::vector<int> parent_atom;
};

BfsTree bfs(const MolecularGraph& g, int root) {
  BfsTree t;
  t.dist.assign(g.atoms.size(), -1);
  t.parent_bond.assign(g.atoms.size(), -1);
  t.parent_atom.assign(g.atoms.size(), -1);
  std::queue<int> q;
  t.dist[root] = 0;
  q.push(root);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int bi : g.adjacency[u]) {
      int v = g.bonds[bi].other(u);
      if (t.dist[v] < 0) {
        t.dist[v] = t.dist[u] + 1;
        t.parent_bond[v] = bi;
        t.parent_atom[v] = u;
        q.push(v);
      }
    }
  }
  return t;
}

using EdgeMask = std::vector<uint64_t>;

EdgeMask make_mask(size_t bond_count) { return EdgeMask((bond_count + 63) / 64, 0); }

void mask_set(EdgeMask& m, int bit) { m[bit / 64] |= uint64_t{1} << (bit % 64); }
bool mask_test(const EdgeMask& m, int bit) { return (m[bit / 64] >> (bit % 64)) & 1; }

void mask_xor(EdgeMask& a, const EdgeMask& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

bool mask_empty(const EdgeMask& m) {
  for (uint64_t w : m)
    if (w) return false;
  return true;
}

int mask_lowest_bit(const EdgeMask& m) {
  for (size_t i = 0; i < m.size(); ++i)
    if (m[i]) return static_cast<int>(i * 64 + __builtin_ctzll(m[i]));
  return -1;
}

struct Candidate {
  EdgeMask mask;
  int weight = 0;
};

// Walks a simple cycle given as an edge set and returns its atoms in
// traversal order, starting from the lowest atom index.
std::vector<int> cycle_atoms(const MolecularGraph& g, const EdgeMask& mask) {
  std::vector<std::vector<int>> incident(g.atoms.size());
  int start = -1;
  for (int bi = 0; bi < g.bond_count(); ++bi) {
    if (!mask_test(mask, bi)) continue;
    incident[g.bonds[bi].a].push_back(bi);
    incident[g.bonds[bi].b].push_back(bi);
    int lo = std::min(g.bonds[bi].a, g.bonds[bi].b);
    if (start < 0 || lo < start) start = lo;
  }
  std::vector<int> atoms;
  int prev_bond = -1, at = start;
  do {
    atoms.push_back(at);
    int next_bond = incident[at][0] == prev_bond ? incident[at][1] : incident[at][0];
    at = g.bonds[next_bond].other(at);
    prev_bond = next_bond;
  } while (at != start);
  return atoms;
}

}  // namespace

int connected_components(const MolecularGraph& graph) {
  int n = graph.atom_count();
  std::vector<bool> seen(n, false);
  int components = 0;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    ++components;
    std::queue<int> q;
    q.push(i);
    seen[i] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int bi : graph.adjacency[u]) {
        int v = graph.bonds[bi].other(u);
        if (!seen[v]) {
          seen[v] = true;
          q.push(v);
        }
      }
    }
  }
  return components;
}

// Horton-style minimum cycle basis: enumerate candidate cycles built from a
// BFS shortest-path tree per vertex plus one closing edge, sort by length,
// and keep the ones that are linearly independent over GF(2).
std::vector<std::vector<int>> find_rings(const MolecularGraph& graph) {
  int n = graph.atom_count();
  int m = graph.bond_count();
  int rank_needed = m - n + connected_components(graph);
  if (rank_needed <= 0) return {};

  std::vector<Candidate> candidates;
  for (int v = 0; v < n; ++v) {
    BfsTree tree = bfs(graph, v);
    for (int bi = 0; bi < m; ++bi) {
      int x = graph.bonds[bi].a, y = graph.bonds[bi].b;
      if (tree.dist[x] < 0 || tree.dist[y] < 0) continue;
      if (tree.parent_bond[x] == bi || tree.parent_bond[y] == bi) continue;  // tree edge
      // Paths v..x and v..y must meet only at v for a simple cycle.
      EdgeMask mask = make_mask(m);
      std::vector<bool> on_path(n, false);
      bool simple = true;
      for (int side = 0; side < 2 && simple; ++side) {
        int at = side == 0 ? x : y;
        while (at != v) {
          if (on_path[at]) {
            simple = false;
            break;
          }
          on_path[at] = true;
          mask_set(mask, tree.parent_bond[at]);
          at = tree.parent_atom[at];
        }
      }
      if (!simple || mask_test(mask, bi)) continue;
      mask_set(mask, bi);
      candidates.push_back({std::move(mask), tree.dist[x] + tree.dist[y] + 1});
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.weight < b.weight; });

  // Greedy GF(2) independence test with on-line Gaussian elimination.
  std::vector<EdgeMask> pivots;     // reduced rows
  std::vector<int> pivot_bits;
  std::vector<std::vector<int>> rings;
  for (const Candidate& cand : candidates) {
    EdgeMask reduced = cand.mask;
    for (size_t i = 0; i < pivots.size(); ++i) {
      if (mask_test(reduced, pivot_bits[i])) mask_xor(reduced, pivots[i]);
    }
    if (mask_empty(reduced)) continue;  // dependent on already-chosen cycles
    pivot_bits.push_back(mask_lowest_bit(reduced));
    pivots.push_back(reduced);
    rings.push_back(cycle_atoms(graph, cand.mask));
    if (static_cast<int>(rings.size()) == rank_needed) break;
  }
  return rings;
}

std::vector<std::vector<int>> shortest_paths(const MolecularGraph& graph) {
  int n = graph.atom_count();
  std::vector<std::vector<int>> dist(n);
  for (int i = 0; i < n; ++i) dist[i] = bfs(graph, i).dist;
  return dist;
}

}  // namespace odor
