#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "odor/molecule.hpp"

namespace odor {

class SmartsError : public std::runtime_error {
 public:
  SmartsError(size_t offset, const std::string& message)
      : std::runtime_error(message + " (at offset " + std::to_string(offset) + ")"),
        offset(offset) {}
  size_t offset;
};

/// Conjunction of atom primitives. Unset fields match anything.
struct AtomPredicate {
  std::optional<int> atomic_number;
  std::optional<bool> aromatic;      // a / A, or symbol case
  std::optional<int> degree;         // D<n>, heavy-atom neighbors
  std::optional<int> total_h;        // H<n>
  std::optional<int> connectivity;   // X<n>, heavy neighbors + hydrogens
  std::optional<int> charge;
  std::optional<bool> in_ring;       // R / R0

  bool matches(const MolecularGraph& g, int atom) const;
};

struct BondPredicate {
  enum Class { kSingleOrAromatic, kSingle, kDouble, kTriple, kAromatic, kAny };
  Class cls = kSingleOrAromatic;

  bool matches(const BondEdge& bond) const;
};

/// Parsed SMARTS pattern: a connected graph of predicates.
struct SmartsPattern {
  struct Edge {
    int a = -1, b = -1;
    BondPredicate pred;
  };

  std::string name;
  std::string text;
  std::vector<AtomPredicate> atoms;
  std::vector<Edge> bonds;
  std::vector<std::vector<int>> adjacency;  // pattern atom -> incident edge indices

  int atom_count() const { return static_cast<int>(atoms.size()); }
};

/// Parses the supported SMARTS dialect: element symbols (upper = aliphatic,
/// lower = aromatic, #n = either), a/A, D/H/X with a digit, +/- charge,
/// R ring membership, implicit/&/; conjunction inside brackets, bond
/// primitives - = # : ~, branches and ring closures. Recursion, OR and
/// negation are unsupported and named in the error.
SmartsPattern parse_smarts(std::string_view text, const std::string& name = "");

/// All injective embeddings of the pattern into the graph, each as a list
/// mapping pattern-atom index to graph-atom index. Empty when none.
std::vector<std::vector<int>> match_pattern(const SmartsPattern& pattern, const MolecularGraph& graph);

/// Number of distinct matched atom sets (automorphic duplicates collapse).
int count_distinct_matches(const SmartsPattern& pattern, const MolecularGraph& graph);

}  // namespace odor
