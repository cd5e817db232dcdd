#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "odor/molecule.hpp"
#include "odor/smarts.hpp"

namespace odor {

/// A named functional group. Several SMARTS lines may share one name (e.g.
/// the four halogens); the group matches when any of its patterns does.
struct PatternGroup {
  std::string name;
  std::vector<SmartsPattern> patterns;
};

/// One line of the MACCS key definition file: 1-based key index, pattern,
/// and the minimum number of distinct matches required (default 1).
struct MaccsKeyLine {
  int index = 0;
  SmartsPattern pattern;
  int min_count = 1;
};

/// Pattern-set file: one `name<TAB>SMARTS` record per line, '#' comments.
std::vector<PatternGroup> parse_pattern_file(std::string_view text, const std::string& origin);
std::vector<PatternGroup> load_pattern_file(const std::string& path);
const std::vector<PatternGroup>& builtin_pattern_groups();
std::string_view builtin_pattern_text();

/// MACCS key file: `index<TAB>SMARTS[<TAB>min_count]` records, '#' comments.
std::vector<MaccsKeyLine> parse_maccs_file(std::string_view text, const std::string& origin);
std::vector<MaccsKeyLine> load_maccs_file(const std::string& path);
const std::vector<MaccsKeyLine>& builtin_maccs_keys();
std::string_view builtin_maccs_text();

struct FeatureConfig {
  std::map<std::string, std::pair<double, double>> normalization_bounds = {
      {"electronegativity", {0.8, 4.0}},
      {"atomic_volume", {4.0, 46.0}},
      {"electron_affinity", {-70.0, 350.0}},
  };
  int morgan_radius = 2;
  int morgan_bits = 2048;   // d1
  int maccs_bits = 166;     // d2, fixed
  int topo_bits = 2048;     // d3
  bool atomic_enabled = true;
  bool edge_enabled = true;
  bool fingerprint_enabled = true;
  /// Functional-group bits enter node features as per-atom participation
  /// (true) or as the molecule-level vector broadcast to every atom (false).
  bool groups_per_atom = true;
  std::vector<PatternGroup> pattern_set;    // defaults to the builtin set
  std::vector<MaccsKeyLine> maccs_keys;     // defaults to the builtin set

  void validate() const;  // throws std::runtime_error on violations
  const std::vector<PatternGroup>& groups() const {
    return pattern_set.empty() ? builtin_pattern_groups() : pattern_set;
  }
  const std::vector<MaccsKeyLine>& keys() const {
    return maccs_keys.empty() ? builtin_maccs_keys() : maccs_keys;
  }

  int group_count() const { return static_cast<int>(groups().size()); }
  // Atom vector layout: element one-hot (10) | degree one-hot (0-5) |
  // charge | radicals | aromatic | ring | implicit-H one-hot (0-4) |
  // electronegativity | volume | electron affinity | group bits (n).
  int atom_dim() const { return 28 + group_count(); }
  int bond_dim() const { return 11; }
  int global_dim() const { return morgan_bits + maccs_bits + topo_bits; }
};

/// Per-molecule feature bundle. Each undirected bond appears as two
/// directed edge rows; rows (i->j) and (j->i) differ only in the swapped
/// endpoint-degree pair.
struct FeatureSet {
  int num_atoms = 0;
  int atom_dim = 0;
  int bond_dim = 0;
  std::vector<double> node_matrix;                // num_atoms x atom_dim
  std::vector<std::pair<int, int>> edge_index;    // directed (src, dst)
  std::vector<double> edge_matrix;                // edge_index.size() x bond_dim
  std::vector<double> global_vector;              // d1 + d2 + d3
  std::vector<double> group_vector;               // molecule-level group bits
  std::vector<double> label_vector;               // optional multi-hot

  int num_edges() const { return static_cast<int>(edge_index.size()); }
};

/// Precomputed functional-group matches for one molecule.
struct GroupMatches {
  std::vector<std::vector<bool>> atom_in_group;  // group -> per-atom flag
  std::vector<bool> group_present;               // group matched anywhere
};
GroupMatches match_groups(const MolecularGraph& graph, const std::vector<PatternGroup>& groups);

/// (value - min) / (max - min), clamped into [0, 1].
double normalize_property(double value, const std::string& property, const FeatureConfig& config);

std::vector<double> atom_features(const MolecularGraph& graph, int atom_index,
                                  const GroupMatches& matches, const FeatureConfig& config);

/// Fractions of single/double/triple bonds among all bonds of the molecule.
/// Aromatic bonds count in the denominator only.
std::array<double, 3> bond_order_ratios(const MolecularGraph& graph);

std::vector<double> bond_features(const MolecularGraph& graph, int bond_index, bool reversed,
                                  const FeatureConfig& config);

std::vector<double> functional_group_vector(const MolecularGraph& graph,
                                            const std::vector<PatternGroup>& groups);

std::vector<uint8_t> morgan_fingerprint(const MolecularGraph& graph, int radius, int bits);
std::vector<uint8_t> maccs_fingerprint(const MolecularGraph& graph, const std::vector<MaccsKeyLine>& keys);
std::vector<uint8_t> topological_fingerprint(const MolecularGraph& graph, int bits);

/// Morgan || MACCS || Topo concatenation, as reals in {0, 1}.
std::vector<double> global_features(const MolecularGraph& graph, const FeatureConfig& config);

FeatureSet featurize_molecule(const MolecularGraph& graph, const FeatureConfig& config);

}  // namespace odor
