#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace odor {

/// One row of the element property table. Electronegativity is in Pauling
/// units, atomic volume in cm^3/mol, electron affinity in kJ/mol.
struct ElementRecord {
  std::string symbol;
  int atomic_number = 0;
  double electronegativity = 0.0;
  double atomic_volume = 0.0;
  double electron_affinity = 0.0;
  std::vector<int> default_valences;
};

/// Element property table. The builtin table covers H plus the organic
/// subset (B, C, N, O, P, S, F, Cl, Br, I); a replacement table can be
/// loaded from a plain-text file with the same column layout.
class ElementTable {
 public:
  static const ElementTable& builtin();

  /// Parses a table from text. Format: one record per line,
  /// `symbol Z electronegativity atomic_volume electron_affinity v1,v2,...`,
  /// whitespace separated, `#` starts a comment.
  static ElementTable parse(std::string_view text, const std::string& origin);
  static ElementTable load(const std::string& path);

  int find(std::string_view symbol) const;  // -1 when absent
  const ElementRecord& operator[](int index) const { return records_[index]; }
  size_t size() const { return records_.size(); }
  const std::vector<ElementRecord>& records() const { return records_; }

  /// Checks the shipped-table invariants: every supported element present
  /// exactly once, and all property values inside their documented ranges.
  void validate() const;

  /// The text of the builtin table (also shipped as data/elements.dat).
  static std::string_view builtin_text();

 private:
  std::vector<ElementRecord> records_;
  std::map<std::string, int, std::less<>> by_symbol_;
};

/// Symbols every table must supply, in the fixed order used for the
/// element one-hot block of atom feature vectors (hydrogen is present in
/// the table but never appears as a graph node, so it is excluded here).
const std::vector<std::string>& organic_subset_symbols();

}  // namespace odor
