#include <doctest.h>

#include "odor/graph_algo.hpp"
#include "odor/smiles.hpp"
#include "support/helpers.hpp"

using namespace odor;

TEST_CASE("cycle basis on small molecules") {
  CHECK(parse_smiles("C1CC1").rings.size() == 1);
  CHECK(parse_smiles("C1CC1").rings[0].size() == 3);
  CHECK(parse_smiles("CCO").rings.empty());

  MolecularGraph naphthalene = parse_smiles("c1ccc2ccccc2c1");
  REQUIRE(naphthalene.rings.size() == 2);
  CHECK(naphthalene.rings[0].size() == 6);
  CHECK(naphthalene.rings[1].size() == 6);
}

TEST_CASE("basis size equals bonds - atoms + components") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    MolecularGraph g = parse_smiles(test::random_smiles(rng));
    int expected = g.bond_count() - g.atom_count() + connected_components(g);
    CHECK(static_cast<int>(g.rings.size()) == expected);
  }
}

TEST_CASE("ring flags match cycle membership") {
  MolecularGraph g = parse_smiles("C1CC1CCC");
  for (int i = 0; i < 3; ++i) CHECK(g.atoms[i].in_ring);
  for (int i = 3; i < 6; ++i) CHECK(!g.atoms[i].in_ring);
  int ring_bonds = 0;
  for (const auto& b : g.bonds) ring_bonds += b.in_ring;
  CHECK(ring_bonds == 3);
}

TEST_CASE("shortest paths on examples") {
  auto d = shortest_paths(parse_smiles("CCO"));
  CHECK(d[0][2] == 2);
  CHECK(d[2][0] == 2);
  CHECK(d[1][1] == 0);

  auto benzene = shortest_paths(parse_smiles("c1ccccc1"));
  int max_dist = 0;
  for (const auto& row : benzene)
    for (int v : row) max_dist = std::max(max_dist, v);
  CHECK(max_dist == 3);

  auto single = shortest_paths(parse_smiles("C"));
  REQUIRE(single.size() == 1);
  CHECK(single[0][0] == 0);
}

TEST_CASE("disconnected pairs use the -1 sentinel") {
  auto d = shortest_paths(parse_smiles("CC.O"));
  CHECK(d[0][1] == 1);
  CHECK(d[0][2] == -1);
  CHECK(d[2][0] == -1);
}

TEST_CASE("shortest paths: symmetry and triangle inequality") {
  Rng rng(22);
  for (int i = 0; i < 50; ++i) {
    MolecularGraph g = parse_smiles(test::random_smiles(rng));
    auto d = shortest_paths(g);
    int n = g.atom_count();
    for (int a = 0; a < n; ++a) {
      CHECK(d[a][a] == 0);
      for (int b = 0; b < n; ++b) {
        CHECK(d[a][b] == d[b][a]);
        if (d[a][b] < 0) continue;
        for (int c = 0; c < n; ++c) {
          if (d[b][c] < 0) continue;
          CHECK(d[a][c] >= 0);
          CHECK(d[a][c] <= d[a][b] + d[b][c]);
        }
      }
    }
  }
}
