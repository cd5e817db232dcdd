#include <doctest.h>

#include "odor/graph_algo.hpp"
#include "odor/smiles.hpp"
#include "support/helpers.hpp"

using namespace odor;

namespace {

int aromatic_atom_count(const MolecularGraph& g) {
  int n = 0;
  for (const auto& a : g.atoms) n += a.aromatic;
  return n;
}

int aromatic_bond_count(const MolecularGraph& g) {
  int n = 0;
  for (const auto& b : g.bonds) n += b.order == BondOrder::kAromatic;
  return n;
}

SmilesErrorKind error_kind(const std::string& smiles) {
  try {
    parse_smiles(smiles);
  } catch (const SmilesError& e) {
    return e.kind;
  }
  FAIL("expected parse error for ", smiles);
  return SmilesErrorKind::kSyntax;
}

}  // namespace

TEST_CASE("ethanol: 3 heavy atoms, 2 single bonds, no rings") {
  MolecularGraph g = parse_smiles("CCO");
  CHECK(g.atom_count() == 3);
  CHECK(g.bond_count() == 2);
  CHECK(g.rings.empty());
  for (const auto& b : g.bonds) CHECK(b.order == BondOrder::kSingle);
  CHECK(g.atoms[0].implicit_h == 3);
  CHECK(g.atoms[1].implicit_h == 2);
  CHECK(g.atoms[2].implicit_h == 1);
}

TEST_CASE("benzene: 6 aromatic atoms, 6 aromatic bonds, one 6-ring") {
  for (const char* smiles : {"c1ccccc1", "C1=CC=CC=C1"}) {
    MolecularGraph g = parse_smiles(smiles);
    CHECK(g.atom_count() == 6);
    CHECK(g.bond_count() == 6);
    REQUIRE(g.rings.size() == 1);
    CHECK(g.rings[0].size() == 6);
    CHECK(aromatic_atom_count(g) == 6);
    CHECK(aromatic_bond_count(g) == 6);
    for (const auto& a : g.atoms) CHECK(a.implicit_h == 1);
  }
}

TEST_CASE("error classes") {
  CHECK(error_kind("C1CC") == SmilesErrorKind::kUnbalancedRingClosure);
  CHECK(error_kind("") == SmilesErrorKind::kEmptyInput);
  CHECK(error_kind("  ") == SmilesErrorKind::kEmptyInput);
  CHECK(error_kind("CQ") == SmilesErrorKind::kUnknownElement);
  CHECK(error_kind("[Xx]C") == SmilesErrorKind::kUnknownElement);
  CHECK(error_kind("C(C") == SmilesErrorKind::kUnbalancedParenthesis);
  CHECK(error_kind("CC)C") == SmilesErrorKind::kUnbalancedParenthesis);
  CHECK(error_kind("C(C)(C)(C)(C)C") == SmilesErrorKind::kValenceViolation);
  CHECK(error_kind("cc") == SmilesErrorKind::kAromaticityError);
  CHECK(error_kind("C12CC12") == SmilesErrorKind::kDuplicateBond);
  CHECK(error_kind("CC=") == SmilesErrorKind::kSyntax);
  CHECK(error_kind("C11") == SmilesErrorKind::kSyntax);
  CHECK(error_kind("C-1CCCCC=1") == SmilesErrorKind::kSyntax);
  CHECK(error_kind("[C") == SmilesErrorKind::kSyntax);
}

TEST_CASE("unknown element reports byte offset") {
  try {
    parse_smiles("CQ");
    FAIL("expected error");
  } catch (const SmilesError& e) {
    CHECK(e.kind == SmilesErrorKind::kUnknownElement);
    CHECK(e.offset == 1);
  }
}

TEST_CASE("bracket atoms: charge and explicit hydrogens") {
  MolecularGraph g = parse_smiles("C[N+](=O)[O-]");
  CHECK(g.atoms[1].formal_charge == 1);
  CHECK(g.atoms[3].formal_charge == -1);
  CHECK(g.atoms[1].implicit_h == 0);

  MolecularGraph ammonium = parse_smiles("[NH4+]");
  CHECK(ammonium.atoms[0].implicit_h == 4);
  CHECK(ammonium.atoms[0].formal_charge == 1);
}

TEST_CASE("aromatic heterocycles fill hydrogens correctly") {
  MolecularGraph pyrrole = parse_smiles("c1cc[nH]c1");
  int n_index = -1;
  for (int i = 0; i < pyrrole.atom_count(); ++i)
    if (pyrrole.element(i).symbol == "N") n_index = i;
  REQUIRE(n_index >= 0);
  CHECK(pyrrole.atoms[n_index].implicit_h == 1);

  MolecularGraph pyridine = parse_smiles("c1ccncc1");
  for (int i = 0; i < pyridine.atom_count(); ++i)
    if (pyridine.element(i).symbol == "N") CHECK(pyridine.atoms[i].implicit_h == 0);

  MolecularGraph furan = parse_smiles("c1ccoc1");
  for (int i = 0; i < furan.atom_count(); ++i)
    if (furan.element(i).symbol == "O") CHECK(furan.atoms[i].implicit_h == 0);
}

TEST_CASE("stereo markers and isotopes ignored with a warning") {
  std::vector<std::string> warnings;
  MolecularGraph g = parse_smiles("C/C=C\\C", ElementTable::builtin(), &warnings);
  CHECK(g.atom_count() == 4);
  CHECK(warnings.size() == 2);

  warnings.clear();
  parse_smiles("[13CH4]", ElementTable::builtin(), &warnings);
  CHECK(warnings.size() == 1);

  warnings.clear();
  parse_smiles("C[C@H](O)C", ElementTable::builtin(), &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("multi-fragment input via dots") {
  MolecularGraph g = parse_smiles("CC(C)Cl.O");
  CHECK(g.atom_count() == 5);
  CHECK(g.bond_count() == 3);
  CHECK(connected_components(g) == 2);
}

TEST_CASE("ring-closure bond symbols and %nn closures") {
  MolecularGraph a = parse_smiles("C%12CCCCC%12");
  CHECK(a.rings.size() == 1);
  MolecularGraph b = parse_smiles("C=1CCCCC=1");
  CHECK(b.bonds.back().order == BondOrder::kDouble);
}

TEST_CASE("conjugation flags") {
  MolecularGraph butadiene = parse_smiles("C=CC=C");
  int central = butadiene.find_bond(1, 2);
  REQUIRE(central >= 0);
  CHECK(butadiene.bonds[central].conjugated);

  MolecularGraph ethylene = parse_smiles("C=C");
  CHECK(!ethylene.bonds[0].conjugated);

  MolecularGraph benzene = parse_smiles("c1ccccc1");
  for (const auto& bond : benzene.bonds) CHECK(bond.conjugated);
}

TEST_CASE("parsing is deterministic") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    std::string smiles = test::random_smiles(rng);
    MolecularGraph a = parse_smiles(smiles);
    MolecularGraph b = parse_smiles(smiles);
    REQUIRE(a.atom_count() == b.atom_count());
    REQUIRE(a.bond_count() == b.bond_count());
    for (int j = 0; j < a.atom_count(); ++j) {
      CHECK(a.atoms[j].element == b.atoms[j].element);
      CHECK(a.atoms[j].implicit_h == b.atoms[j].implicit_h);
      CHECK(a.atoms[j].aromatic == b.atoms[j].aromatic);
      CHECK(a.atoms[j].in_ring == b.atoms[j].in_ring);
    }
    for (int j = 0; j < a.bond_count(); ++j) {
      CHECK(a.bonds[j].a == b.bonds[j].a);
      CHECK(a.bonds[j].b == b.bonds[j].b);
      CHECK(a.bonds[j].order == b.bonds[j].order);
    }
  }
}

TEST_CASE("valence check holds for every parsed atom") {
  // degree (as bond-order sum) + implicit H must hit a permitted valence.
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    MolecularGraph g = parse_smiles(test::random_smiles(rng));
    for (int a = 0; a < g.atom_count(); ++a) {
      double sum = g.atoms[a].implicit_h;
      int aromatic = 0;
      for (int bi : g.adjacency[a]) {
        if (g.bonds[bi].order == BondOrder::kAromatic) ++aromatic;
        else sum += bond_order_value(g.bonds[bi].order);
      }
      const auto& rec = g.element(a);
      bool ok = false;
      for (int rc : aromatic > 0 ? std::vector<int>{aromatic + 1, aromatic} : std::vector<int>{0})
        for (int v : rec.default_valences) {
          int adj = rec.symbol == "C"   ? v - std::abs(g.atoms[a].formal_charge)
                    : rec.symbol == "B" ? v - g.atoms[a].formal_charge
                                        : v + g.atoms[a].formal_charge;
          if (static_cast<int>(sum) + rc == adj) ok = true;
        }
      CHECK(ok);
    }
  }
}
