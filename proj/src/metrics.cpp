#include "odor/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace odor {

// Sort once, then walk tie groups: within a group of equal scores, each
// positive is tied with every negative of the group; all negatives ranked
// strictly below a positive are concordant.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::runtime_error("auroc: size mismatch");
  size_t n = scores.size();
  int64_t positives = std::accumulate(labels.begin(), labels.end(), int64_t{0});
  int64_t negatives = static_cast<int64_t>(n) - positives;
  if (positives == 0 || negatives == 0)
    throw std::runtime_error("auroc: needs at least one positive and one negative");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  double concordant = 0.0, tied = 0.0;
  int64_t negatives_below = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    int64_t group_pos = 0, group_neg = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]]) ++group_pos;
      else ++group_neg;
      ++j;
    }
    concordant += static_cast<double>(group_pos) * negatives_below;
    tied += static_cast<double>(group_pos) * group_neg;
    negatives_below += group_neg;
    i = j;
  }
  return (concordant + 0.5 * tied) / (static_cast<double>(positives) * negatives);
}

namespace {

struct Confusion {
  int64_t tp = 0, fp = 0, fn = 0;
  double f1() const {
    double denom = 2.0 * tp + fp + fn;
    return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
  }
};

}  // namespace

MetricReport compute_metrics(const std::vector<double>& scores, const std::vector<double>& labels,
                             int rows, int label_count, double threshold) {
  if (scores.size() != labels.size() ||
      scores.size() != static_cast<size_t>(rows) * label_count)
    throw std::runtime_error("compute_metrics: shape mismatch");
  MetricReport report;
  report.per_label_auroc.assign(label_count, -1.0);
  report.per_label_support.assign(label_count, 0);

  double auroc_sum = 0.0;
  int auroc_count = 0;
  double f1_sum = 0.0;
  int f1_count = 0;
  Confusion micro;

  for (int l = 0; l < label_count; ++l) {
    std::vector<double> col_scores(rows);
    std::vector<int> col_labels(rows);
    int positives = 0;
    Confusion c;
    for (int r = 0; r < rows; ++r) {
      col_scores[r] = scores[static_cast<size_t>(r) * label_count + l];
      col_labels[r] = labels[static_cast<size_t>(r) * label_count + l] > 0.5 ? 1 : 0;
      positives += col_labels[r];
      bool pred = col_scores[r] >= threshold;
      if (pred && col_labels[r]) ++c.tp;
      if (pred && !col_labels[r]) ++c.fp;
      if (!pred && col_labels[r]) ++c.fn;
    }
    report.per_label_support[l] = positives;
    micro.tp += c.tp;
    micro.fp += c.fp;
    micro.fn += c.fn;
    if (positives == 0 || positives == rows) {
      report.skipped_labels.push_back(l);
    } else {
      report.per_label_auroc[l] = auroc(col_scores, col_labels);
      auroc_sum += report.per_label_auroc[l];
      ++auroc_count;
    }
    if (positives > 0) {
      f1_sum += c.f1();
      ++f1_count;
    }
  }
  report.mean_auroc = auroc_count ? auroc_sum / auroc_count : 0.0;
  report.macro_f1 = f1_count ? f1_sum / f1_count : 0.0;
  report.micro_f1 = micro.f1();
  return report;
}

double f1_macro(const std::vector<double>& scores, const std::vector<double>& labels, int rows,
                int label_count, double threshold) {
  return compute_metrics(scores, labels, rows, label_count, threshold).macro_f1;
}

std::string MetricReport::to_json(const std::vector<std::string>& label_names) const {
  nlohmann::json j;
  j["mean_auroc"] = mean_auroc;
  j["macro_f1"] = macro_f1;
  j["micro_f1"] = micro_f1;
  nlohmann::json per_label = nlohmann::json::object();
  for (size_t l = 0; l < per_label_auroc.size(); ++l) {
    std::string name = l < label_names.size() ? label_names[l] : std::to_string(l);
    if (per_label_auroc[l] >= 0.0) per_label[name] = per_label_auroc[l];
  }
  j["per_label_auroc"] = per_label;
  nlohmann::json skipped = nlohmann::json::array();
  for (int l : skipped_labels)
    skipped.push_back(static_cast<size_t>(l) < label_names.size() ? label_names[l]
                                                                  : std::to_string(l));
  j["skipped_labels"] = skipped;
  nlohmann::json support = nlohmann::json::object();
  for (size_t l = 0; l < per_label_support.size(); ++l) {
    std::string name = l < label_names.size() ? label_names[l] : std::to_string(l);
    support[name] = per_label_support[l];
  }
  j["per_label_support"] = support;
  return j.dump(2);
}

}  // namespace odor
