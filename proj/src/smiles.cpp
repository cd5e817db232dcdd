#include "odor/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "odor/graph_algo.hpp"

namespace odor {

namespace {

// Pending bond symbol between the previous atom and whatever comes next.
enum class PendingBond { kNone, kSingle, kDouble, kTriple, kAromatic };

BondOrder pending_to_order(PendingBond p) {
  switch (p) {
    case PendingBond::kDouble: return BondOrder::kDouble;
    case PendingBond::kTriple: return BondOrder::kTriple;
    case PendingBond::kAromatic: return BondOrder::kAromatic;
    default: return BondOrder::kSingle;
  }
}

struct RingOpening {
  int atom = -1;
  PendingBond bond = PendingBond::kNone;
  size_t offset = 0;
};

class Parser {
 public:
  Parser(std::string_view text, const ElementTable& table, std::vector<std::string>* warnings)
      : text_(text), table_(table), warnings_(warnings) {
    mol_.elements = &table;
  }

  MolecularGraph run() {
    parse_chain();
    if (mol_.atoms.empty()) throw SmilesError(SmilesErrorKind::kEmptyInput, 0, "empty SMILES input");
    if (!open_rings_.empty()) {
      auto& [digit, opening] = *open_rings_.begin();
      throw SmilesError(SmilesErrorKind::kUnbalancedRingClosure, opening.offset,
                        "unbalanced ring closure digit " + std::to_string(digit));
    }
    mol_.rebuild_adjacency();
    mol_.rings = find_rings(mol_);
    mark_ring_membership();
    perceive_aromaticity();
    assign_hydrogens_and_check_valence();
    mark_conjugation();
    return std::move(mol_);
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() { return text_[pos_++]; }

  void warn(const std::string& message) {
    if (warnings_) warnings_->push_back(message + " (at offset " + std::to_string(pos_ - 1) + ")");
  }

  [[noreturn]] void fail(SmilesErrorKind kind, size_t offset, const std::string& msg) {
    throw SmilesError(kind, offset, msg);
  }

  void parse_chain() {
    while (!eof()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        continue;
      }
      switch (c) {
        case '(': {
          size_t at = pos_++;
          if (prev_atom_ < 0) fail(SmilesErrorKind::kSyntax, at, "branch before any atom");
          if (pending_ != PendingBond::kNone) fail(SmilesErrorKind::kSyntax, at, "bond symbol before '('");
          branch_stack_.push_back(prev_atom_);
          branch_offsets_.push_back(at);
          break;
        }
        case ')': {
          size_t at = pos_++;
          if (branch_stack_.empty())
            fail(SmilesErrorKind::kUnbalancedParenthesis, at, "unmatched ')'");
          if (pending_ != PendingBond::kNone) fail(SmilesErrorKind::kSyntax, at, "dangling bond before ')'");
          prev_atom_ = branch_stack_.back();
          branch_stack_.pop_back();
          branch_offsets_.pop_back();
          break;
        }
        case '-': set_pending(PendingBond::kSingle); break;
        case '=': set_pending(PendingBond::kDouble); break;
        case '#': set_pending(PendingBond::kTriple); break;
        case ':': set_pending(PendingBond::kAromatic); break;
        case '/':
        case '\\':
          set_pending(PendingBond::kSingle);
          warn(std::string("stereo bond '") + c + "' treated as single");
          break;
        case '.': {
          size_t at = pos_++;
          if (pending_ != PendingBond::kNone) fail(SmilesErrorKind::kSyntax, at, "bond symbol before '.'");
          prev_atom_ = -1;
          break;
        }
        case '%': {
          size_t at = pos_++;
          if (pos_ + 1 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
              !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))
            fail(SmilesErrorKind::kSyntax, at, "'%' must be followed by two digits");
          int number = (take() - '0') * 10 + (take() - '0');
          handle_ring_digit(number, at);
          break;
        }
        default:
          if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t at = pos_++;
            handle_ring_digit(c - '0', at);
          } else if (c == '[') {
            parse_bracket_atom();
          } else if (std::isalpha(static_cast<unsigned char>(c))) {
            parse_organic_atom();
          } else {
            fail(SmilesErrorKind::kSyntax, pos_, std::string("unexpected character '") + c + "'");
          }
      }
    }
    if (pending_ != PendingBond::kNone)
      fail(SmilesErrorKind::kSyntax, text_.size(), "dangling bond at end of input");
    if (!branch_stack_.empty())
      fail(SmilesErrorKind::kUnbalancedParenthesis, branch_offsets_.back(), "unclosed '('");
  }

  void set_pending(PendingBond p) {
    size_t at = pos_++;
    if (pending_ != PendingBond::kNone) fail(SmilesErrorKind::kSyntax, at, "two bond symbols in a row");
    if (prev_atom_ < 0) fail(SmilesErrorKind::kSyntax, at, "bond symbol before any atom");
    pending_ = p;
  }

  void handle_ring_digit(int number, size_t offset) {
    if (prev_atom_ < 0) fail(SmilesErrorKind::kSyntax, offset, "ring closure before any atom");
    auto it = open_rings_.find(number);
    if (it == open_rings_.end()) {
      open_rings_[number] = {prev_atom_, pending_, offset};
      pending_ = PendingBond::kNone;
      return;
    }
    RingOpening opening = it->second;
    open_rings_.erase(it);
    if (opening.atom == prev_atom_)
      fail(SmilesErrorKind::kSyntax, offset, "ring closure bonds an atom to itself");
    PendingBond bond = PendingBond::kNone;
    if (opening.bond != PendingBond::kNone && pending_ != PendingBond::kNone && opening.bond != pending_)
      fail(SmilesErrorKind::kSyntax, offset, "conflicting bond orders on ring closure");
    bond = opening.bond != PendingBond::kNone ? opening.bond : pending_;
    pending_ = PendingBond::kNone;
    add_bond(opening.atom, prev_atom_, bond, offset);
  }

  void add_bond(int a, int b, PendingBond pending, size_t offset) {
    for (const BondEdge& e : mol_.bonds) {
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a))
        fail(SmilesErrorKind::kDuplicateBond, offset, "duplicate bond between atoms");
    }
    BondEdge edge;
    edge.a = a;
    edge.b = b;
    if (pending == PendingBond::kNone) {
      bool both_aromatic = mol_.atoms[a].written_aromatic && mol_.atoms[b].written_aromatic;
      edge.order = both_aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
    } else {
      edge.order = pending_to_order(pending);
    }
    mol_.bonds.push_back(edge);
  }

  int add_atom(AtomNode atom, size_t offset) {
    int index = static_cast<int>(mol_.atoms.size());
    mol_.atoms.push_back(atom);
    atom_offsets_.push_back(offset);
    if (prev_atom_ >= 0) add_bond(prev_atom_, index, pending_, offset);
    pending_ = PendingBond::kNone;
    prev_atom_ = index;
    return index;
  }

  void parse_organic_atom() {
    size_t at = pos_;
    AtomNode atom;
    // Two-letter symbols first.
    if (pos_ + 1 < text_.size()) {
      std::string two = {text_[pos_], text_[pos_ + 1]};
      if (two == "Cl" || two == "Br") {
        atom.element = table_.find(two);
        pos_ += 2;
        add_atom(atom, at);
        return;
      }
    }
    char c = take();
    static const std::string kAliphatic = "BCNOPSFI";
    static const std::string kAromatic = "bcnops";
    if (kAliphatic.find(c) != std::string::npos) {
      atom.element = table_.find(std::string(1, c));
    } else if (kAromatic.find(c) != std::string::npos) {
      atom.element = table_.find(std::string(1, static_cast<char>(std::toupper(c))));
      atom.written_aromatic = true;
      atom.aromatic = true;
    } else {
      fail(SmilesErrorKind::kUnknownElement, at, std::string("unknown element symbol '") + c + "'");
    }
    if (atom.element < 0)
      fail(SmilesErrorKind::kUnknownElement, at, std::string("element '") + c + "' not in table");
    add_atom(atom, at);
  }

  void parse_bracket_atom() {
    size_t open = pos_++;
    AtomNode atom;
    atom.bracket = true;

    // Isotope: accepted and ignored.
    bool saw_isotope = false;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
      take();
      saw_isotope = true;
    }
    if (saw_isotope) warn("isotope specification ignored");

    if (eof()) fail(SmilesErrorKind::kSyntax, open, "unterminated bracket atom");
    size_t sym_at = pos_;
    char c = take();
    std::string symbol;
    if (std::isupper(static_cast<unsigned char>(c))) {
      symbol = c;
      if (!eof() && std::islower(static_cast<unsigned char>(peek()))) {
        std::string two = symbol + peek();
        if (table_.find(two) >= 0) {
          symbol = two;
          ++pos_;
        }
      }
      atom.element = table_.find(symbol);
    } else if (std::islower(static_cast<unsigned char>(c))) {
      static const std::string kAromatic = "bcnops";
      if (kAromatic.find(c) == std::string::npos)
        fail(SmilesErrorKind::kUnknownElement, sym_at, std::string("unknown aromatic element '") + c + "'");
      symbol = static_cast<char>(std::toupper(c));
      atom.element = table_.find(symbol);
      atom.written_aromatic = true;
      atom.aromatic = true;
    } else {
      fail(SmilesErrorKind::kSyntax, sym_at, "expected element symbol in bracket atom");
    }
    if (atom.element < 0)
      fail(SmilesErrorKind::kUnknownElement, sym_at, "unknown element symbol '" + symbol + "'");
    if (symbol == "H")
      fail(SmilesErrorKind::kSyntax, sym_at, "explicit hydrogen atoms are not supported");

    while (!eof() && peek() != ']') {
      char t = take();
      if (t == '@') {
        if (!eof() && peek() == '@') take();
        warn("chirality marker ignored");
      } else if (t == 'H') {
        atom.implicit_h = 1;
        if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) atom.implicit_h = take() - '0';
      } else if (t == '+' || t == '-') {
        int sign = t == '+' ? 1 : -1;
        int magnitude = 1;
        if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
          magnitude = take() - '0';
        } else {
          while (!eof() && peek() == t) {
            take();
            ++magnitude;
          }
        }
        atom.formal_charge = sign * magnitude;
      } else if (t == ':') {
        fail(SmilesErrorKind::kSyntax, pos_ - 1, "atom class maps are not supported");
      } else {
        fail(SmilesErrorKind::kSyntax, pos_ - 1, std::string("unexpected '") + t + "' in bracket atom");
      }
    }
    if (eof()) fail(SmilesErrorKind::kSyntax, open, "unterminated bracket atom");
    take();  // ']'
    add_atom(atom, open);
  }

  // ---- post-parse perception ----

  void mark_ring_membership() {
    for (const auto& ring : mol_.rings) {
      for (size_t i = 0; i < ring.size(); ++i) {
        mol_.atoms[ring[i]].in_ring = true;
        int bi = mol_.find_bond(ring[i], ring[(i + 1) % ring.size()]);
        if (bi >= 0) mol_.bonds[bi].in_ring = true;
      }
    }
  }

  bool has_bond_of(int atom, BondOrder order, bool require_ring_partner, bool& found_exocyclic) const {
    bool found = false;
    for (int bi : mol_.adjacency[atom]) {
      const BondEdge& e = mol_.bonds[bi];
      if (e.order != order) continue;
      if (!require_ring_partner || mol_.atoms[e.other(atom)].in_ring)
        found = true;
      else
        found_exocyclic = true;
    }
    return found;
  }

  // Pi-electron contribution of one atom for the Hueckel count, or -1 when
  // the atom cannot take part in an aromatic ring. The table:
  //   atom with a double bond to a ring atom, or an aromatic bond -> 1
  //   atom whose only double bond is exocyclic to a chain atom    -> 0
  //   N/P with no double bond (lone pair donor, [nH]-like)        -> 2
  //   O/S with no double bond                                      -> 2
  //   C- -> 2, C+ -> 0, B -> 0; anything else without a pi bond   -> not aromatic
  int pi_contribution(int atom) const {
    const AtomNode& node = mol_.atoms[atom];
    if (mol_.degree(atom) > 3) return -1;
    bool exocyclic_double = false;
    for (int bi : mol_.adjacency[atom])
      if (mol_.bonds[bi].order == BondOrder::kTriple) return -1;
    for (int bi : mol_.adjacency[atom])
      if (mol_.bonds[bi].order == BondOrder::kAromatic) return 1;
    if (has_bond_of(atom, BondOrder::kDouble, /*require_ring_partner=*/true, exocyclic_double)) return 1;
    if (exocyclic_double) return 0;
    const std::string& sym = mol_.element(atom).symbol;
    if (sym == "O" || sym == "S") return 2;
    if (sym == "N" || sym == "P") return 2;
    if (sym == "C") {
      if (node.formal_charge < 0) return 2;
      if (node.formal_charge > 0) return 0;
      return -1;
    }
    if (sym == "B") return 0;
    return -1;
  }

  void make_ring_aromatic(const std::vector<int>& ring) {
    for (size_t i = 0; i < ring.size(); ++i) {
      mol_.atoms[ring[i]].aromatic = true;
      int bi = mol_.find_bond(ring[i], ring[(i + 1) % ring.size()]);
      if (bi >= 0) mol_.bonds[bi].order = BondOrder::kAromatic;
    }
  }

  // A basis ring is aromatic iff every member was written lowercase, or it
  // passes a 4n+2 pi-electron count. Runs to a fixpoint so fused systems
  // written in Kekule form aromatize regardless of basis order.
  void perceive_aromaticity() {
    std::vector<bool> done(mol_.rings.size(), false);
    for (size_t r = 0; r < mol_.rings.size(); ++r) {
      const auto& ring = mol_.rings[r];
      bool all_lower = std::all_of(ring.begin(), ring.end(),
                                   [&](int a) { return mol_.atoms[a].written_aromatic; });
      if (all_lower) {
        make_ring_aromatic(ring);
        done[r] = true;
      }
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t r = 0; r < mol_.rings.size(); ++r) {
        if (done[r]) continue;
        const auto& ring = mol_.rings[r];
        int total = 0;
        bool ok = true;
        for (int a : ring) {
          int pi = pi_contribution(a);
          if (pi < 0) {
            ok = false;
            break;
          }
          total += pi;
        }
        if (ok && total >= 2 && (total - 2) % 4 == 0) {
          make_ring_aromatic(ring);
          done[r] = true;
          changed = true;
        }
      }
    }
    // Every atom written lowercase must have ended up in an aromatic ring,
    // and ':' bonds must join aromatic atoms.
    for (int i = 0; i < mol_.atom_count(); ++i) {
      const AtomNode& a = mol_.atoms[i];
      if (!a.written_aromatic) {
        // perception may have set aromatic=true; written flag irrelevant here
        continue;
      }
      bool in_aromatic_ring = false;
      for (int bi : mol_.adjacency[i])
        if (mol_.bonds[bi].order == BondOrder::kAromatic) in_aromatic_ring = true;
      if (!a.in_ring || !in_aromatic_ring)
        fail(SmilesErrorKind::kAromaticityError, atom_offsets_[i],
             "aromatic atom is not part of an aromatic ring");
    }
    for (const BondEdge& e : mol_.bonds) {
      if (e.order == BondOrder::kAromatic &&
          !(mol_.atoms[e.a].aromatic && mol_.atoms[e.b].aromatic))
        fail(SmilesErrorKind::kAromaticityError, atom_offsets_[e.a],
             "aromatic bond between non-aromatic atoms");
    }
    // Final atom flags follow the perceived bonds.
    for (int i = 0; i < mol_.atom_count(); ++i) {
      bool any_aromatic_bond = false;
      for (int bi : mol_.adjacency[i])
        if (mol_.bonds[bi].order == BondOrder::kAromatic) any_aromatic_bond = true;
      mol_.atoms[i].aromatic = any_aromatic_bond;
    }
  }

  // Permitted valences adjusted for formal charge. Nonpositive entries drop.
  std::vector<int> adjusted_valences(int atom) const {
    const ElementRecord& rec = mol_.element(atom);
    const AtomNode& node = mol_.atoms[atom];
    std::vector<int> out;
    for (int v : rec.default_valences) {
      int adj = v;
      const std::string& sym = rec.symbol;
      if (sym == "C")
        adj = v - std::abs(node.formal_charge);
      else if (sym == "B")
        adj = v - node.formal_charge;
      else
        adj = v + node.formal_charge;  // N, O, P, S, halogens
      if (adj > 0) out.push_back(adj);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Bond-order sum excluding aromatic bonds, plus already-known hydrogens.
  int base_valence(int atom) const {
    double sum = mol_.atoms[atom].implicit_h;
    for (int bi : mol_.adjacency[atom]) {
      if (mol_.bonds[bi].order == BondOrder::kAromatic) continue;
      sum += bond_order_value(mol_.bonds[bi].order);
    }
    return static_cast<int>(sum);
  }

  int aromatic_bond_count(int atom) const {
    int k = 0;
    for (int bi : mol_.adjacency[atom])
      if (mol_.bonds[bi].order == BondOrder::kAromatic) ++k;
    return k;
  }

  // Implicit hydrogens fill each non-bracket atom to the lowest permitted
  // valence >= its current bond-order sum. An atom with k aromatic bonds
  // accounts for them as k+1 when possible (one Kekule double bond) and k
  // otherwise (pure lone-pair donor, e.g. furan oxygen).
  void assign_hydrogens_and_check_valence() {
    for (int i = 0; i < mol_.atom_count(); ++i) {
      AtomNode& node = mol_.atoms[i];
      std::vector<int> permitted = adjusted_valences(i);
      int k = aromatic_bond_count(i);
      std::vector<int> ring_terms = k > 0 ? std::vector<int>{k + 1, k} : std::vector<int>{0};
      if (permitted.empty())
        fail(SmilesErrorKind::kValenceViolation, atom_offsets_[i],
             "no permitted valence for " + mol_.element(i).symbol + " with charge " +
                 std::to_string(node.formal_charge));
      if (!node.bracket) {
        int filled = -1;
        for (int rc : ring_terms) {
          int total = base_valence(i) + rc;
          for (int v : permitted) {
            if (v >= total) {
              filled = v - total;
              break;
            }
          }
          if (filled >= 0) break;
        }
        if (filled < 0)
          fail(SmilesErrorKind::kValenceViolation, atom_offsets_[i],
               "valence violation on " + mol_.element(i).symbol);
        node.implicit_h = filled;
      }
      // Final check, bracket atoms included.
      bool ok = false;
      for (int rc : ring_terms) {
        int total = base_valence(i) + rc;
        for (int v : permitted)
          if (v == total) ok = true;
      }
      if (!ok)
        fail(SmilesErrorKind::kValenceViolation, atom_offsets_[i],
             "valence violation on " + mol_.element(i).symbol + ": bonds plus hydrogens do not "
             "match a permitted valence");
    }
  }

  bool has_multiple_bond_other_than(int atom, int excluded_bond) const {
    for (int bi : mol_.adjacency[atom]) {
      if (bi == excluded_bond) continue;
      if (mol_.bonds[bi].order != BondOrder::kSingle) return true;
    }
    return false;
  }

  // A bond is conjugated when it is aromatic, or when both endpoints carry
  // a pi bond and at least one of those pi bonds is not the bond itself.
  void mark_conjugation() {
    for (size_t bi = 0; bi < mol_.bonds.size(); ++bi) {
      BondEdge& e = mol_.bonds[bi];
      if (e.order == BondOrder::kAromatic) {
        e.conjugated = true;
        continue;
      }
      bool a_pi = has_multiple_bond_other_than(e.a, -1);
      bool b_pi = has_multiple_bond_other_than(e.b, -1);
      bool other_pi = has_multiple_bond_other_than(e.a, static_cast<int>(bi)) ||
                      has_multiple_bond_other_than(e.b, static_cast<int>(bi));
      e.conjugated = a_pi && b_pi && other_pi;
    }
  }

  std::string_view text_;
  const ElementTable& table_;
  std::vector<std::string>* warnings_;
  size_t pos_ = 0;

  MolecularGraph mol_;
  std::vector<size_t> atom_offsets_;
  std::vector<int> branch_stack_;
  std::vector<size_t> branch_offsets_;
  std::map<int, RingOpening> open_rings_;
  int prev_atom_ = -1;
  PendingBond pending_ = PendingBond::kNone;
};

}  // namespace

MolecularGraph parse_smiles(std::string_view text, const ElementTable& table,
                            std::vector<std::string>* warnings) {
  return Parser(text, table, warnings).run();
}

}  // namespace odor
