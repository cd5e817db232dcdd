#include "odor/featurize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace odor {

namespace {

// Shipped functional-group set. The halogen group is spelled as four lines
// sharing one name; a group matches when any of its lines does.
constexpr std::string_view kBuiltinPatterns = R"(# name	SMARTS
hydroxyl	[OX2H]
carbonyl	[CX3]=[OX1]
aldehyde	[CX3H1]=[OX1]
ketone	C[CX3](=[OX1])C
carboxylic_acid	[CX3](=[OX1])[OX2H1]
ester	[CX3](=[OX1])[OX2H0][#6]
ether	[OX2H0]([#6])[#6]
amine_primary	[NX3H2][#6]
amine_secondary	[NX3H1]([#6])[#6]
amine_tertiary	[NX3H0]([#6])([#6])[#6]
amide	[CX3](=[OX1])[NX3]
nitrile	[CX2]#[NX1]
nitro	[NX3](=[OX1])[OX1]
thiol	[SX2H]
sulfide	[SX2H0]([#6])[#6]
halogen	F
halogen	Cl
halogen	Br
halogen	I
aromatic_ring	[a]
phenol	[OX2H]c
alkene	C=C
alkyne	C#C
)";

// Shipped MACCS key subset. Indices follow the public 166-key ordering
// where the key is expressible in the supported SMARTS dialect; keys not
// listed here are always zero. Third column = minimum distinct matches.
constexpr std::string_view kBuiltinMaccs = R"(# index	SMARTS	min_count
27	[#53]	1	# iodine
29	[#15]	1	# phosphorus
35	[#35]	1	# bromine
42	[#9]	1	# fluorine
49	[#6]=[#6]	1	# C=C
84	[NX3H2]	1	# primary amine
88	[#16]	1	# sulfur
98	[CX2]#[NX1]	1	# nitrile
103	[#17]	1	# chlorine
116	[CX4H2]	2	# two or more methylene carbons
118	[#8X2]	1	# divalent oxygen
127	[#8]	2	# more than one oxygen
130	[#7X3]	1	# trivalent nitrogen
139	[OX2H]	1	# hydroxyl
142	[#7]	2	# more than one nitrogen
145	[R]	2	# more than one ring atom set is approximated by ring atoms
149	[CX4H3]	2	# more than one methyl
152	[CX3](=[OX1])[#6]	1	# carbonyl on carbon
154	[CX3]=[OX1]	1	# carbonyl
157	[#6][OX2H]	1	# C-OH
160	[CX4H3]	1	# methyl
161	[#7]	1	# nitrogen
162	[a]	1	# aromatic
164	[#8]	1	# oxygen
165	[R]	1	# ring
)";

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Tab-separated fields. '#' only starts a comment at the beginning of a
// field, so SMARTS atomic-number primitives like [#6] survive.
std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, '\t')) {
    item = strip(item);
    if (!item.empty() && item[0] == '#') break;
    fields.push_back(item);
  }
  return fields;
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + ": " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

std::string_view builtin_pattern_text() { return kBuiltinPatterns; }
std::string_view builtin_maccs_text() { return kBuiltinMaccs; }

std::vector<PatternGroup> parse_pattern_file(std::string_view text, const std::string& origin) {
  std::vector<PatternGroup> groups;
  std::map<std::string, size_t> by_name;
  std::stringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_tabs(line);
    if (fields.empty()) continue;
    if (fields.size() < 2)
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": expected name<TAB>SMARTS");
    std::string name = fields[0];
    std::string smarts = fields[1];
    SmartsPattern pattern;
    try {
      pattern = parse_smarts(smarts, name);
    } catch (const SmartsError& e) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      by_name[name] = groups.size();
      groups.push_back({name, {std::move(pattern)}});
    } else {
      groups[it->second].patterns.push_back(std::move(pattern));
    }
  }
  return groups;
}

std::vector<PatternGroup> load_pattern_file(const std::string& path) {
  return parse_pattern_file(read_file(path, "pattern file"), path);
}

const std::vector<PatternGroup>& builtin_pattern_groups() {
  static const std::vector<PatternGroup> groups =
      parse_pattern_file(kBuiltinPatterns, "<builtin pattern set>");
  return groups;
}

std::vector<MaccsKeyLine> parse_maccs_file(std::string_view text, const std::string& origin) {
  std::vector<MaccsKeyLine> keys;
  std::stringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_tabs(line);
    if (fields.empty()) continue;
    if (fields.size() < 2)
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected index<TAB>SMARTS[<TAB>min_count]");
    MaccsKeyLine key;
    try {
      key.index = std::stoi(strip(fields[0]));
    } catch (const std::exception&) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": bad key index");
    }
    if (key.index < 1 || key.index > 166)
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": key index out of 1..166");
    try {
      key.pattern = parse_smarts(strip(fields[1]), "maccs_" + strip(fields[0]));
    } catch (const SmartsError& e) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (fields.size() >= 3 && !strip(fields[2]).empty()) {
      try {
        key.min_count = std::stoi(strip(fields[2]));
      } catch (const std::exception&) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": bad min_count");
      }
    }
    keys.push_back(std::move(key));
  }
  return keys;
}

std::vector<MaccsKeyLine> load_maccs_file(const std::string& path) {
  return parse_maccs_file(read_file(path, "MACCS key file"), path);
}

const std::vector<MaccsKeyLine>& builtin_maccs_keys() {
  static const std::vector<MaccsKeyLine> keys = parse_maccs_file(kBuiltinMaccs, "<builtin MACCS keys>");
  return keys;
}

void FeatureConfig::validate() const {
  for (const char* name : {"electronegativity", "atomic_volume", "electron_affinity"}) {
    auto it = normalization_bounds.find(name);
    if (it == normalization_bounds.end())
      throw std::runtime_error(std::string("missing normalization bounds for ") + name);
    if (it->second.second <= it->second.first)
      throw std::runtime_error(std::string("degenerate normalization bounds for ") + name);
  }
  if (morgan_bits < 64 || !is_power_of_two(morgan_bits))
    throw std::runtime_error("morgan_bits must be a power of two >= 64");
  if (topo_bits < 64 || !is_power_of_two(topo_bits))
    throw std::runtime_error("topo_bits must be a power of two >= 64");
  if (maccs_bits != 166) throw std::runtime_error("maccs_bits must be 166");
  if (morgan_radius < 0) throw std::runtime_error("morgan_radius must be >= 0");
}

GroupMatches match_groups(const MolecularGraph& graph, const std::vector<PatternGroup>& groups) {
  GroupMatches out;
  out.atom_in_group.assign(groups.size(), std::vector<bool>(graph.atom_count(), false));
  out.group_present.assign(groups.size(), false);
  for (size_t g = 0; g < groups.size(); ++g) {
    for (const SmartsPattern& p : groups[g].patterns) {
      for (const auto& mapping : match_pattern(p, graph)) {
        out.group_present[g] = true;
        for (int atom : mapping) out.atom_in_group[g][atom] = true;
      }
    }
  }
  return out;
}

double normalize_property(double value, const std::string& property, const FeatureConfig& config) {
  auto it = config.normalization_bounds.find(property);
  if (it == config.normalization_bounds.end())
    throw std::runtime_error("unknown property name: " + property);
  auto [lo, hi] = it->second;
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

std::vector<double> atom_features(const MolecularGraph& graph, int atom_index,
                                  const GroupMatches& matches, const FeatureConfig& config) {
  const AtomNode& atom = graph.atoms[atom_index];
  const ElementRecord& rec = graph.element(atom_index);
  std::vector<double> v(config.atom_dim(), 0.0);
  if (config.atomic_enabled) {
    const auto& symbols = organic_subset_symbols();
    auto sym = std::find(symbols.begin(), symbols.end(), rec.symbol);
    if (sym != symbols.end()) v[sym - symbols.begin()] = 1.0;
    v[10 + std::min(graph.degree(atom_index), 5)] = 1.0;
    v[16] = atom.formal_charge / 4.0;
    v[17] = atom.radical_electrons / 4.0;
    v[18] = atom.aromatic ? 1.0 : 0.0;
    v[19] = atom.in_ring ? 1.0 : 0.0;
    v[20 + std::min(atom.implicit_h, 4)] = 1.0;
    v[25] = normalize_property(rec.electronegativity, "electronegativity", config);
    v[26] = normalize_property(rec.atomic_volume, "atomic_volume", config);
    v[27] = normalize_property(rec.electron_affinity, "electron_affinity", config);
  }
  for (size_t g = 0; g < matches.group_present.size(); ++g) {
    bool bit = config.groups_per_atom ? bool(matches.atom_in_group[g][atom_index])
                                      : bool(matches.group_present[g]);
    v[28 + g] = bit ? 1.0 : 0.0;
  }
  return v;
}

std::array<double, 3> bond_order_ratios(const MolecularGraph& graph) {
  std::array<double, 3> counts = {0, 0, 0};
  if (graph.bonds.empty()) return counts;
  for (const BondEdge& e : graph.bonds) {
    if (e.order == BondOrder::kSingle) counts[0] += 1;
    if (e.order == BondOrder::kDouble) counts[1] += 1;
    if (e.order == BondOrder::kTriple) counts[2] += 1;
  }
  double total = static_cast<double>(graph.bonds.size());
  return {counts[0] / total, counts[1] / total, counts[2] / total};
}

std::vector<double> bond_features(const MolecularGraph& graph, int bond_index, bool reversed,
                                  const FeatureConfig& config) {
  std::vector<double> v(config.bond_dim(), 0.0);
  if (!config.edge_enabled) return v;
  const BondEdge& bond = graph.bonds[bond_index];
  switch (bond.order) {
    case BondOrder::kSingle: v[0] = 1.0; break;
    case BondOrder::kDouble: v[1] = 1.0; break;
    case BondOrder::kTriple: v[2] = 1.0; break;
    case BondOrder::kAromatic: v[3] = 1.0; break;
  }
  v[4] = bond.conjugated ? 1.0 : 0.0;
  v[5] = bond.in_ring ? 1.0 : 0.0;
  int src = reversed ? bond.b : bond.a;
  int dst = reversed ? bond.a : bond.b;
  v[6] = graph.degree(src) / 6.0;
  v[7] = graph.degree(dst) / 6.0;
  auto phi = bond_order_ratios(graph);
  v[8] = phi[0];
  v[9] = phi[1];
  v[10] = phi[2];
  return v;
}

std::vector<double> functional_group_vector(const MolecularGraph& graph,
                                            const std::vector<PatternGroup>& groups) {
  GroupMatches matches = match_groups(graph, groups);
  std::vector<double> v(groups.size(), 0.0);
  for (size_t g = 0; g < groups.size(); ++g) v[g] = matches.group_present[g] ? 1.0 : 0.0;
  return v;
}

FeatureSet featurize_molecule(const MolecularGraph& graph, const FeatureConfig& config) {
  config.validate();
  FeatureSet fs;
  fs.num_atoms = graph.atom_count();
  fs.atom_dim = config.atom_dim();
  fs.bond_dim = config.bond_dim();

  GroupMatches matches = match_groups(graph, config.groups());
  fs.node_matrix.reserve(size_t(fs.num_atoms) * fs.atom_dim);
  for (int i = 0; i < fs.num_atoms; ++i) {
    auto row = atom_features(graph, i, matches, config);
    fs.node_matrix.insert(fs.node_matrix.end(), row.begin(), row.end());
  }

  fs.edge_index.reserve(graph.bonds.size() * 2);
  fs.edge_matrix.reserve(graph.bonds.size() * 2 * fs.bond_dim);
  for (int b = 0; b < graph.bond_count(); ++b) {
    for (bool reversed : {false, true}) {
      const BondEdge& bond = graph.bonds[b];
      fs.edge_index.emplace_back(reversed ? bond.b : bond.a, reversed ? bond.a : bond.b);
      auto row = bond_features(graph, b, reversed, config);
      fs.edge_matrix.insert(fs.edge_matrix.end(), row.begin(), row.end());
    }
  }

  fs.global_vector = global_features(graph, config);
  fs.group_vector.assign(matches.group_present.size(), 0.0);
  for (size_t g = 0; g < matches.group_present.size(); ++g)
    fs.group_vector[g] = matches.group_present[g] ? 1.0 : 0.0;
  return fs;
}

}  // namespace odor
