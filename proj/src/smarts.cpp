#include "odor/smarts.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace odor {

bool AtomPredicate::matches(const MolecularGraph& g, int atom) const {
  const AtomNode& node = g.atoms[atom];
  if (atomic_number && g.element(atom).atomic_number != *atomic_number) return false;
  if (aromatic && node.aromatic != *aromatic) return false;
  if (degree && g.degree(atom) != *degree) return false;
  if (total_h && node.implicit_h != *total_h) return false;
  if (connectivity && g.degree(atom) + node.implicit_h != *connectivity) return false;
  if (charge && node.formal_charge != *charge) return false;
  if (in_ring && node.in_ring != *in_ring) return false;
  return true;
}

bool BondPredicate::matches(const BondEdge& bond) const {
  switch (cls) {
    case kAny: return true;
    case kSingle: return bond.order == BondOrder::kSingle;
    case kDouble: return bond.order == BondOrder::kDouble;
    case kTriple: return bond.order == BondOrder::kTriple;
    case kAromatic: return bond.order == BondOrder::kAromatic;
    case kSingleOrAromatic:
      return bond.order == BondOrder::kSingle || bond.order == BondOrder::kAromatic;
  }
  return false;
}

namespace {

int atomic_number_of(const std::string& symbol) {
  const ElementTable& t = ElementTable::builtin();
  int idx = t.find(symbol);
  return idx < 0 ? -1 : t[idx].atomic_number;
}

class SmartsParser {
 public:
  explicit SmartsParser(std::string_view text) : text_(text) {}

  SmartsPattern run() {
    while (!eof()) step();
    if (pending_set_) fail(text_.size(), "dangling bond at end of pattern");
    if (!branch_stack_.empty()) fail(text_.size(), "unclosed '(' in pattern");
    if (!open_rings_.empty()) fail(text_.size(), "unbalanced ring closure in pattern");
    if (pattern_.atoms.empty()) fail(0, "empty SMARTS pattern");
    pattern_.adjacency.assign(pattern_.atoms.size(), {});
    for (size_t i = 0; i < pattern_.bonds.size(); ++i) {
      pattern_.adjacency[pattern_.bonds[i].a].push_back(static_cast<int>(i));
      pattern_.adjacency[pattern_.bonds[i].b].push_back(static_cast<int>(i));
    }
    check_connected();
    return std::move(pattern_);
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() { return text_[pos_++]; }

  [[noreturn]] void fail(size_t offset, const std::string& msg) { throw SmartsError(offset, msg); }

  void step() {
    char c = peek();
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos_;
      return;
    }
    switch (c) {
      case '(': {
        size_t at = pos_++;
        if (prev_atom_ < 0) fail(at, "branch before any atom");
        branch_stack_.push_back(prev_atom_);
        return;
      }
      case ')': {
        size_t at = pos_++;
        if (branch_stack_.empty()) fail(at, "unmatched ')'");
        prev_atom_ = branch_stack_.back();
        branch_stack_.pop_back();
        return;
      }
      case '-': set_pending(BondPredicate::kSingle); return;
      case '=': set_pending(BondPredicate::kDouble); return;
      case '#': set_pending(BondPredicate::kTriple); return;
      case ':': set_pending(BondPredicate::kAromatic); return;
      case '~': set_pending(BondPredicate::kAny); return;
      case ',': fail(pos_, "unsupported primitive: OR (',') is outside the dialect");
      case '!': fail(pos_, "unsupported primitive: negation ('!') is outside the dialect");
      case '$': fail(pos_, "recursive SMARTS unsupported");
      case '[': parse_bracket(); return;
      default:
        if (std::isdigit(static_cast<unsigned char>(c))) {
          size_t at = pos_++;
          handle_ring_digit(c - '0', at);
          return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
          parse_plain_atom();
          return;
        }
        fail(pos_, std::string("unexpected character '") + c + "' in pattern");
    }
  }

  void set_pending(BondPredicate::Class cls) {
    size_t at = pos_++;
    if (pending_set_) fail(at, "two bond primitives in a row");
    if (prev_atom_ < 0) fail(at, "bond primitive before any atom");
    pending_ = {static_cast<BondPredicate::Class>(cls)};
    pending_set_ = true;
  }

  void handle_ring_digit(int number, size_t offset) {
    if (prev_atom_ < 0) fail(offset, "ring closure before any atom");
    auto it = open_rings_.find(number);
    if (it == open_rings_.end()) {
      open_rings_[number] = {prev_atom_, pending_, pending_set_};
      pending_set_ = false;
      pending_ = {};
      return;
    }
    auto [atom, bond, had_bond] = it->second;
    open_rings_.erase(it);
    BondPredicate pred;
    if (had_bond)
      pred = bond;
    else if (pending_set_)
      pred = pending_;
    pending_set_ = false;
    pending_ = {};
    add_edge(atom, prev_atom_, pred, offset);
  }

  void add_edge(int a, int b, BondPredicate pred, size_t offset) {
    if (a == b) fail(offset, "ring closure bonds an atom to itself");
    for (const auto& e : pattern_.bonds)
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) fail(offset, "duplicate pattern bond");
    pattern_.bonds.push_back({a, b, pred});
  }

  int add_atom(const AtomPredicate& pred) {
    int index = static_cast<int>(pattern_.atoms.size());
    pattern_.atoms.push_back(pred);
    if (prev_atom_ >= 0) {
      BondPredicate pred_bond = pending_set_ ? pending_ : BondPredicate{};
      add_edge(prev_atom_, index, pred_bond, pos_);
    }
    pending_set_ = false;
    pending_ = {};
    prev_atom_ = index;
    return index;
  }

  void parse_plain_atom() {
    size_t at = pos_;
    AtomPredicate pred;
    if (pos_ + 1 < text_.size()) {
      std::string two = {text_[pos_], text_[pos_ + 1]};
      if (two == "Cl" || two == "Br") {
        pred.atomic_number = atomic_number_of(two);
        pred.aromatic = false;
        pos_ += 2;
        add_atom(pred);
        return;
      }
    }
    char c = take();
    static const std::string kAliphatic = "BCNOPSFI";
    static const std::string kAromaticLetters = "bcnops";
    if (c == 'a') {
      pred.aromatic = true;
    } else if (c == 'A') {
      pred.aromatic = false;
    } else if (kAliphatic.find(c) != std::string::npos) {
      pred.atomic_number = atomic_number_of(std::string(1, c));
      pred.aromatic = false;
    } else if (kAromaticLetters.find(c) != std::string::npos) {
      pred.atomic_number = atomic_number_of(std::string(1, static_cast<char>(std::toupper(c))));
      pred.aromatic = true;
    } else {
      fail(at, std::string("unsupported primitive: '") + c + "'");
    }
    add_atom(pred);
  }

  int take_digits(int fallback) {
    if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) return fallback;
    int value = 0;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) value = value * 10 + (take() - '0');
    return value;
  }

  void parse_bracket() {
    size_t open = pos_++;
    AtomPredicate pred;
    bool saw_primitive = false;
    while (!eof() && peek() != ']') {
      char c = take();
      size_t at = pos_ - 1;
      if (c == '&' || c == ';') continue;  // conjunction separators
      if (c == ',') fail(at, "unsupported primitive: OR (',') is outside the dialect");
      if (c == '!') fail(at, "unsupported primitive: negation ('!') is outside the dialect");
      if (c == '$') fail(at, "recursive SMARTS unsupported");
      saw_primitive = true;
      if (c == '#') {
        int z = take_digits(-1);
        if (z < 0) fail(at, "'#' must be followed by an atomic number");
        pred.atomic_number = z;
      } else if (c == 'a') {
        pred.aromatic = true;
      } else if (c == 'A') {
        pred.aromatic = false;
      } else if (c == 'D') {
        pred.degree = take_digits(1);
      } else if (c == 'H') {
        pred.total_h = take_digits(1);
      } else if (c == 'X') {
        pred.connectivity = take_digits(1);
      } else if (c == 'R') {
        int n = take_digits(-1);
        if (n == 0)
          pred.in_ring = false;
        else if (n < 0 || n == 1)
          pred.in_ring = true;
        else
          fail(at, "unsupported primitive: R" + std::to_string(n) + " (only R and R0)");
      } else if (c == '+' || c == '-') {
        int sign = c == '+' ? 1 : -1;
        int magnitude = take_digits(-1);
        if (magnitude < 0) {
          magnitude = 1;
          while (!eof() && peek() == c) {
            take();
            ++magnitude;
          }
        }
        pred.charge = sign * magnitude;
      } else if (std::isupper(static_cast<unsigned char>(c))) {
        std::string symbol(1, c);
        if (!eof() && std::islower(static_cast<unsigned char>(peek()))) {
          std::string two = symbol + peek();
          if (atomic_number_of(two) > 0) {
            symbol = two;
            ++pos_;
          }
        }
        int z = atomic_number_of(symbol);
        if (z < 0) fail(at, "unsupported primitive: element '" + symbol + "'");
        pred.atomic_number = z;
        pred.aromatic = false;
      } else if (std::islower(static_cast<unsigned char>(c))) {
        static const std::string kAromaticLetters = "bcnops";
        if (kAromaticLetters.find(c) == std::string::npos)
          fail(at, std::string("unsupported primitive: '") + c + "'");
        pred.atomic_number = atomic_number_of(std::string(1, static_cast<char>(std::toupper(c))));
        pred.aromatic = true;
      } else {
        fail(at, std::string("unsupported primitive: '") + c + "'");
      }
    }
    if (eof()) fail(open, "unterminated bracket");
    take();  // ']'
    if (!saw_primitive) fail(open, "empty bracket");
    add_atom(pred);
  }

  void check_connected() {
    std::vector<bool> seen(pattern_.atoms.size(), false);
    std::vector<int> stack = {0};
    seen[0] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int ei : pattern_.adjacency[u]) {
        const auto& e = pattern_.bonds[ei];
        int v = e.a == u ? e.b : e.a;
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
      fail(0, "pattern graph must be connected");
  }

  std::string_view text_;
  size_t pos_ = 0;
  SmartsPattern pattern_;
  std::vector<int> branch_stack_;
  std::map<int, std::tuple<int, BondPredicate, bool>> open_rings_;
  int prev_atom_ = -1;
  BondPredicate pending_;
  bool pending_set_ = false;
};

// Backtracking injective subgraph search. Pattern atoms are visited in a
// DFS order so each new atom (after the first) is anchored to an already
// mapped neighbor, which keeps candidate sets small.
class Matcher {
 public:
  Matcher(const SmartsPattern& pattern, const MolecularGraph& graph)
      : pattern_(pattern), graph_(graph) {
    order_.reserve(pattern_.atoms.size());
    anchor_edge_.reserve(pattern_.atoms.size());
    std::vector<bool> placed(pattern_.atoms.size(), false);
    order_.push_back(0);
    anchor_edge_.push_back(-1);
    placed[0] = true;
    for (size_t i = 0; i < order_.size(); ++i) {
      int u = order_[i];
      for (int ei : pattern_.adjacency[u]) {
        const auto& e = pattern_.bonds[ei];
        int v = e.a == u ? e.b : e.a;
        if (!placed[v]) {
          placed[v] = true;
          order_.push_back(v);
          anchor_edge_.push_back(ei);
        }
      }
    }
  }

  std::vector<std::vector<int>> all_matches() {
    mapping_.assign(pattern_.atoms.size(), -1);
    used_.assign(graph_.atoms.size(), false);
    results_.clear();
    extend(0);
    return std::move(results_);
  }

 private:
  void extend(size_t depth) {
    if (depth == order_.size()) {
      results_.push_back(mapping_);
      return;
    }
    int p = order_[depth];
    if (depth == 0) {
      for (int g = 0; g < graph_.atom_count(); ++g) try_assign(depth, p, g);
      return;
    }
    const auto& anchor = pattern_.bonds[anchor_edge_[depth]];
    int anchored_p = anchor.a == p ? anchor.b : anchor.a;
    int anchored_g = mapping_[anchored_p];
    for (int bi : graph_.adjacency[anchored_g]) {
      int g = graph_.bonds[bi].other(anchored_g);
      try_assign(depth, p, g);
    }
  }

  void try_assign(size_t depth, int p, int g) {
    if (used_[g]) return;
    if (!pattern_.atoms[p].matches(graph_, g)) return;
    // All pattern edges into already-mapped atoms must be present and match.
    for (int ei : pattern_.adjacency[p]) {
      const auto& e = pattern_.bonds[ei];
      int q = e.a == p ? e.b : e.a;
      if (mapping_[q] < 0) continue;
      int bond = graph_.find_bond(g, mapping_[q]);
      if (bond < 0 || !e.pred.matches(graph_.bonds[bond])) return;
    }
    mapping_[p] = g;
    used_[g] = true;
    extend(depth + 1);
    mapping_[p] = -1;
    used_[g] = false;
  }

  const SmartsPattern& pattern_;
  const MolecularGraph& graph_;
  std::vector<int> order_;
  std::vector<int> anchor_edge_;
  std::vector<int> mapping_;
  std::vector<bool> used_;
  std::vector<std::vector<int>> results_;
};

}  // namespace

SmartsPattern parse_smarts(std::string_view text, const std::string& name) {
  SmartsPattern p = SmartsParser(text).run();
  p.name = name;
  p.text = std::string(text);
  return p;
}

std::vector<std::vector<int>> match_pattern(const SmartsPattern& pattern, const MolecularGraph& graph) {
  if (pattern.atom_count() == 0 || graph.atom_count() == 0) return {};
  return Matcher(pattern, graph).all_matches();
}

int count_distinct_matches(const SmartsPattern& pattern, const MolecularGraph& graph) {
  std::set<std::set<int>> sets;
  for (const auto& m : match_pattern(pattern, graph)) sets.insert(std::set<int>(m.begin(), m.end()));
  return static_cast<int>(sets.size());
}

}  // namespace odor
