#pragma once

#include <string>
#include <vector>

namespace odor {

/// AUROC by the rank statistic (concordant + 0.5*tied) / (P*N).
/// Requires at least one positive and one negative; the caller filters
/// degenerate labels.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

struct MetricReport {
  std::vector<double> per_label_auroc;  // -1 for skipped labels
  std::vector<int> per_label_support;   // positives per label
  std::vector<int> skipped_labels;      // no positives or no negatives
  double mean_auroc = 0.0;              // over evaluable labels
  double macro_f1 = 0.0;                // labels with >= 1 positive
  double micro_f1 = 0.0;

  std::string to_json(const std::vector<std::string>& label_names) const;
};

/// Scores and labels are row-major (rows x labels) matrices.
MetricReport compute_metrics(const std::vector<double>& scores, const std::vector<double>& labels,
                             int rows, int label_count, double threshold = 0.5);

double f1_macro(const std::vector<double>& scores, const std::vector<double>& labels, int rows,
                int label_count, double threshold = 0.5);

}  // namespace odor
