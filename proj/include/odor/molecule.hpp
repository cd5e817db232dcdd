#pragma once

#include <vector>

#include "odor/elements.hpp"

namespace odor {

enum class BondOrder { kSingle, kDouble, kTriple, kAromatic };

struct AtomNode {
  int element = -1;  // index into the owning graph's ElementTable
  int formal_charge = 0;
  int implicit_h = 0;  // bracket-specified hydrogens also land here
  int radical_electrons = 0;
  bool aromatic = false;
  bool in_ring = false;
  bool written_aromatic = false;  // lowercase in the input
  bool bracket = false;           // written as a bracket atom (no H filling)
};

struct BondEdge {
  int a = -1, b = -1;  // atom indices as written (a first)
  BondOrder order = BondOrder::kSingle;
  bool conjugated = false;
  bool in_ring = false;

  int other(int atom) const { return atom == a ? b : a; }
};

/// Molecular graph: atoms as nodes, bonds as edges. Immutable after parsing.
struct MolecularGraph {
  const ElementTable* elements = nullptr;
  std::vector<AtomNode> atoms;
  std::vector<BondEdge> bonds;
  std::vector<std::vector<int>> adjacency;  // atom -> incident bond indices
  std::vector<std::vector<int>> rings;      // minimum cycle basis, atom cycles

  int atom_count() const { return static_cast<int>(atoms.size()); }
  int bond_count() const { return static_cast<int>(bonds.size()); }
  int degree(int atom) const { return static_cast<int>(adjacency[atom].size()); }

  const ElementRecord& element(int atom) const { return (*elements)[atoms[atom].element]; }

  int neighbor(int atom, int incident) const { return bonds[adjacency[atom][incident]].other(atom); }

  /// Index of the bond joining a and b, or -1.
  int find_bond(int a, int b) const {
    for (int bi : adjacency[a])
      if (bonds[bi].other(a) == b) return bi;
    return -1;
  }

  void rebuild_adjacency() {
    adjacency.assign(atoms.size(), {});
    for (size_t i = 0; i < bonds.size(); ++i) {
      adjacency[bonds[i].a].push_back(static_cast<int>(i));
      adjacency[bonds[i].b].push_back(static_cast<int>(i));
    }
  }
};

inline double bond_order_value(BondOrder order) {
  switch (order) {
    case BondOrder::kSingle: return 1.0;
    case BondOrder::kDouble: return 2.0;
    case BondOrder::kTriple: return 3.0;
    case BondOrder::kAromatic: return 1.5;
  }
  return 1.0;
}

}  // namespace odor
