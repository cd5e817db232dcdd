#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "odor/elements.hpp"

namespace odor {

struct DatasetRecord {
  std::string smiles;
  std::vector<std::string> labels;
};

struct RejectedRow {
  int line = 0;  // 1-based file line number
  std::string reason;
};

struct Dataset {
  std::vector<DatasetRecord> records;
  std::vector<RejectedRow> rejected;
  int total_rows = 0;  // data rows read, accepted + rejected
};

/// Loads the UTF-8 CSV contract: header `smiles,labels`, labels separated
/// by ';'. Rows with invalid SMILES (or, when `require_labels`, an empty
/// label field) are rejected with the line number and reason, never
/// silently dropped. Throws on an unreadable file or malformed header.
Dataset load_dataset(const std::string& path, bool require_labels = true,
                     const ElementTable& table = ElementTable::builtin());

class LabelVocabulary {
 public:
  static LabelVocabulary from_records(const std::vector<DatasetRecord>& records);
  static LabelVocabulary from_names(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int index) const { return names_[index]; }
  const std::vector<std::string>& names() const { return names_; }
  int find(const std::string& name) const;  // -1 when absent

  /// Multi-hot encoding; unknown labels are collected into `unknown`.
  std::vector<double> encode(const std::vector<std::string>& labels,
                             std::vector<std::string>* unknown = nullptr) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
};

/// Seeded uniform shuffle then prefix split; deterministic per seed,
/// disjoint and exhaustive. Throws on fewer than 2 records.
std::pair<std::vector<size_t>, std::vector<size_t>> split_indices(size_t count, double fraction,
                                                                  uint64_t seed);
std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_dataset(
    const std::vector<DatasetRecord>& records, double fraction, uint64_t seed);

struct DatasetStats {
  std::map<int, int> labels_per_molecule;        // histogram
  std::map<std::string, int> descriptor_support;
  int molecules = 0;
  double fraction_1_to_6 = 0.0;

  std::string to_json() const;
  std::string to_table() const;
};

DatasetStats dataset_stats(const std::vector<DatasetRecord>& records);

}  // namespace odor
