#include <doctest.h>

#include "odor/elements.hpp"
#include "odor/featurize.hpp"

using namespace odor;

#ifndef ODOR_DATA_DIR
#define ODOR_DATA_DIR "data"
#endif

TEST_CASE("builtin table passes its invariants") {
  CHECK_NOTHROW(ElementTable::builtin().validate());
  CHECK(ElementTable::builtin().size() == 11);  // organic subset + H
  for (const auto& sym : organic_subset_symbols())
    CHECK(ElementTable::builtin().find(sym) >= 0);
}

TEST_CASE("shipped data files match the builtins") {
  ElementTable from_file = ElementTable::load(std::string(ODOR_DATA_DIR) + "/elements.dat");
  REQUIRE(from_file.size() == ElementTable::builtin().size());
  for (size_t i = 0; i < from_file.size(); ++i) {
    const auto& a = from_file[static_cast<int>(i)];
    const auto& b = ElementTable::builtin()[static_cast<int>(i)];
    CHECK(a.symbol == b.symbol);
    CHECK(a.atomic_number == b.atomic_number);
    CHECK(a.electronegativity == b.electronegativity);
    CHECK(a.atomic_volume == b.atomic_volume);
    CHECK(a.electron_affinity == b.electron_affinity);
    CHECK(a.default_valences == b.default_valences);
  }

  auto groups = load_pattern_file(std::string(ODOR_DATA_DIR) + "/functional_groups.dat");
  REQUIRE(groups.size() == builtin_pattern_groups().size());
  for (size_t g = 0; g < groups.size(); ++g) {
    CHECK(groups[g].name == builtin_pattern_groups()[g].name);
    REQUIRE(groups[g].patterns.size() == builtin_pattern_groups()[g].patterns.size());
    for (size_t p = 0; p < groups[g].patterns.size(); ++p)
      CHECK(groups[g].patterns[p].text == builtin_pattern_groups()[g].patterns[p].text);
  }

  auto keys = load_maccs_file(std::string(ODOR_DATA_DIR) + "/maccs_keys.dat");
  REQUIRE(keys.size() == builtin_maccs_keys().size());
  for (size_t k = 0; k < keys.size(); ++k) {
    CHECK(keys[k].index == builtin_maccs_keys()[k].index);
    CHECK(keys[k].pattern.text == builtin_maccs_keys()[k].pattern.text);
    CHECK(keys[k].min_count == builtin_maccs_keys()[k].min_count);
  }
}

TEST_CASE("the shipped pattern set covers the documented 20 groups") {
  CHECK(builtin_pattern_groups().size() == 20);
}

TEST_CASE("bad tables are rejected") {
  CHECK_THROWS(ElementTable::parse("C 6 2.55 5.3 121.8 4", "test"));  // missing elements
  CHECK_THROWS(ElementTable::parse(std::string(ElementTable::builtin_text()) + "C 6 1 5 1 4\n",
                                   "test"));  // duplicate
  CHECK_THROWS(ElementTable::load("/nonexistent/elements.dat"));
}
