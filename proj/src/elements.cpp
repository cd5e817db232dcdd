#include "odor/elements.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace odor {

namespace {

// Pauling electronegativities, atomic volumes (cm^3/mol) and electron
// affinities (kJ/mol) from standard reference tables. Valence lists follow
// the SMILES organic-subset conventions.
constexpr std::string_view kBuiltinTable = R"(# symbol  Z  electronegativity  atomic_volume  electron_affinity  valences
H    1   2.20  14.4   72.8   1
B    5   2.04   4.6   26.7   3
C    6   2.55   5.3  121.8   4
N    7   3.04  17.3   -6.8   3,5
O    8   3.44  14.0  141.0   2
F    9   3.98  17.1  328.0   1
P   15   2.19  17.0   72.0   3,5
S   16   2.58  15.5  200.4   2,4,6
Cl  17   3.16  22.7  349.0   1
Br  35   2.96  23.5  324.6   1
I   53   2.66  25.7  295.2   1
)";

std::vector<int> parse_valence_list(const std::string& field, const std::string& origin, int line_no) {
  std::vector<int> out;
  std::stringstream ss(field);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": bad valence list '" + field + "'");
    }
  }
  if (out.empty()) {
    throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty valence list");
  }
  return out;
}

}  // namespace

std::string_view ElementTable::builtin_text() { return kBuiltinTable; }

ElementTable ElementTable::parse(std::string_view text, const std::string& origin) {
  ElementTable table;
  std::stringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::stringstream fields(line);
    ElementRecord rec;
    std::string valences;
    if (!(fields >> rec.symbol)) continue;  // blank line
    if (!(fields >> rec.atomic_number >> rec.electronegativity >> rec.atomic_volume >>
          rec.electron_affinity >> valences)) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": expected 6 columns");
    }
    rec.default_valences = parse_valence_list(valences, origin, line_no);
    if (table.by_symbol_.count(rec.symbol)) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": duplicate element '" + rec.symbol + "'");
    }
    table.by_symbol_[rec.symbol] = static_cast<int>(table.records_.size());
    table.records_.push_back(std::move(rec));
  }
  table.validate();
  return table;
}

ElementTable ElementTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open element table: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

const ElementTable& ElementTable::builtin() {
  static const ElementTable table = parse(kBuiltinTable, "<builtin element table>");
  return table;
}

int ElementTable::find(std::string_view symbol) const {
  auto it = by_symbol_.find(symbol);
  return it == by_symbol_.end() ? -1 : it->second;
}

void ElementTable::validate() const {
  for (const auto& sym : organic_subset_symbols()) {
    if (find(sym) < 0) throw std::runtime_error("element table missing required element " + sym);
  }
  if (find("H") < 0) throw std::runtime_error("element table missing required element H");
  for (const auto& rec : records_) {
    if (rec.electronegativity < 0.8 || rec.electronegativity > 4.0)
      throw std::runtime_error("electronegativity out of [0.8, 4.0] for " + rec.symbol);
    if (rec.atomic_volume < 4.0 || rec.atomic_volume > 46.0)
      throw std::runtime_error("atomic volume out of [4.0, 46.0] for " + rec.symbol);
    if (rec.electron_affinity < -70.0 || rec.electron_affinity > 350.0)
      throw std::runtime_error("electron affinity out of [-70.0, 350.0] for " + rec.symbol);
  }
}

const std::vector<std::string>& organic_subset_symbols() {
  static const std::vector<std::string> symbols = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"};
  return symbols;
}

}  // namespace odor
