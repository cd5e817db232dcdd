#include "odor/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "odor/rng.hpp"
#include "odor/smiles.hpp"

namespace odor {

namespace {

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> parse_labels(const std::string& field) {
  std::vector<std::string> labels;
  std::stringstream ss(field);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = strip(item);
    if (!item.empty()) labels.push_back(item);
  }
  return labels;
}

}  // namespace

Dataset load_dataset(const std::string& path, bool require_labels, const ElementTable& table) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset is empty: " + path);
  if (strip(line) != "smiles,labels")
    throw std::runtime_error("malformed header in " + path + ": expected 'smiles,labels', got '" +
                             strip(line) + "'");
  Dataset ds;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    ++ds.total_rows;
    size_t comma = line.find(',');
    if (comma == std::string::npos) {
      ds.rejected.push_back({line_no, "missing ',' separator"});
      continue;
    }
    DatasetRecord rec;
    rec.smiles = strip(line.substr(0, comma));
    rec.labels = parse_labels(line.substr(comma + 1));
    if (rec.smiles.empty()) {
      ds.rejected.push_back({line_no, "empty SMILES field"});
      continue;
    }
    if (require_labels && rec.labels.empty()) {
      ds.rejected.push_back({line_no, "empty label field"});
      continue;
    }
    try {
      parse_smiles(rec.smiles, table);
    } catch (const SmilesError& e) {
      ds.rejected.push_back({line_no, e.what()});
      continue;
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

LabelVocabulary LabelVocabulary::from_records(const std::vector<DatasetRecord>& records) {
  std::vector<std::string> names;
  for (const auto& rec : records)
    for (const auto& label : rec.labels) names.push_back(label);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return from_names(std::move(names));
}

LabelVocabulary LabelVocabulary::from_names(std::vector<std::string> names) {
  LabelVocabulary v;
  v.names_ = std::move(names);
  for (size_t i = 0; i < v.names_.size(); ++i) {
    if (v.index_.count(v.names_[i]))
      throw std::runtime_error("duplicate label name: " + v.names_[i]);
    v.index_[v.names_[i]] = static_cast<int>(i);
  }
  return v;
}

int LabelVocabulary::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

std::vector<double> LabelVocabulary::encode(const std::vector<std::string>& labels,
                                            std::vector<std::string>* unknown) const {
  std::vector<double> out(names_.size(), 0.0);
  for (const auto& label : labels) {
    int idx = find(label);
    if (idx < 0) {
      if (unknown) unknown->push_back(label);
    } else {
      out[idx] = 1.0;
    }
  }
  return out;
}

std::pair<std::vector<size_t>, std::vector<size_t>> split_indices(size_t count, double fraction,
                                                                  uint64_t seed) {
  if (count < 2) throw std::runtime_error("split: need at least 2 records");
  if (fraction <= 0.0 || fraction >= 1.0) throw std::runtime_error("split: fraction must be in (0,1)");
  std::vector<size_t> order(count);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  size_t train = static_cast<size_t>(std::floor(fraction * static_cast<double>(count)));
  train = std::clamp<size_t>(train, 1, count - 1);
  return {std::vector<size_t>(order.begin(), order.begin() + train),
          std::vector<size_t>(order.begin() + train, order.end())};
}

std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_dataset(
    const std::vector<DatasetRecord>& records, double fraction, uint64_t seed) {
  auto [train_idx, test_idx] = split_indices(records.size(), fraction, seed);
  std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> out;
  for (size_t i : train_idx) out.first.push_back(records[i]);
  for (size_t i : test_idx) out.second.push_back(records[i]);
  return out;
}

DatasetStats dataset_stats(const std::vector<DatasetRecord>& records) {
  DatasetStats stats;
  stats.molecules = static_cast<int>(records.size());
  int in_1_to_6 = 0;
  for (const auto& rec : records) {
    int count = static_cast<int>(rec.labels.size());
    stats.labels_per_molecule[count] += 1;
    if (count >= 1 && count <= 6) ++in_1_to_6;
    for (const auto& label : rec.labels) stats.descriptor_support[label] += 1;
  }
  stats.fraction_1_to_6 = stats.molecules ? static_cast<double>(in_1_to_6) / stats.molecules : 0.0;
  return stats;
}

std::string DatasetStats::to_json() const {
  nlohmann::json j;
  j["molecules"] = molecules;
  j["fraction_1_to_6"] = fraction_1_to_6;
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [count, n] : labels_per_molecule) hist[std::to_string(count)] = n;
  j["labels_per_molecule"] = hist;
  nlohmann::json support = nlohmann::json::object();
  for (const auto& [name, n] : descriptor_support) support[name] = n;
  j["descriptor_support"] = support;
  return j.dump(2);
}

std::string DatasetStats::to_table() const {
  std::ostringstream os;
  os << "molecules: " << molecules << "\n";
  os << std::fixed << std::setprecision(4);
  os << "fraction with 1-6 labels: " << fraction_1_to_6 << "\n\n";
  os << "labels/molecule  count\n";
  for (const auto& [count, n] : labels_per_molecule)
    os << std::setw(15) << count << "  " << n << "\n";
  os << "\ndescriptor" << std::setw(24) << "support\n";
  std::vector<std::pair<std::string, int>> rows(descriptor_support.begin(), descriptor_support.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [name, n] : rows) os << std::left << std::setw(28) << name << std::right << n << "\n";
  return os.str();
}

}  // namespace odor
