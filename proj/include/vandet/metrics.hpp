#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "vandet/error.hpp"

namespace vandet {

enum class CurveKind { roc, pr };

// ROC points are (FPR, TPR); PR points are (recall, precision).
struct CurvePoints {
  CurveKind kind = CurveKind::roc;
  std::vector<std::pair<double, double>> points;
};

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct MetricsRow {
  std::string model_tag;
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.5;
};

namespace detail {

inline void check_scores(const std::vector<double>& scores, const std::vector<double>& labels) {
  if (scores.size() != labels.size())
    raise(ErrorCode::MisalignedScores, std::to_string(scores.size()) + " scores vs " +
                                           std::to_string(labels.size()) + " labels");
  for (double s : scores)
    if (!std::isfinite(s)) raise(ErrorCode::MisalignedScores, "non-finite score");
}

inline std::pair<std::uint64_t, std::uint64_t> class_counts(const std::vector<double>& labels) {
  std::uint64_t pos = 0, neg = 0;
  for (double y : labels) (y > 0.5 ? pos : neg) += 1;
  return {pos, neg};
}

}  // namespace detail

// Mann-Whitney AUC via average ranks in one sort: the probability that a
// random positive outscores a random negative, ties counting one half.
inline double roc_auc(const std::vector<double>& scores, const std::vector<double>& labels) {
  detail::check_scores(scores, labels);
  auto [pos, neg] = detail::class_counts(labels);
  if (pos == 0 || neg == 0)
    raise(ErrorCode::SingleClassInput, "ROC-AUC needs both classes present");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // ranks i+1 .. j (1-based); every tied item gets the average rank
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] > 0.5) rank_sum_pos += avg_rank;
    i = j;
  }
  double p = static_cast<double>(pos), n = static_cast<double>(neg);
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n);
}

// One point per distinct score threshold, descending, ties grouped; (0,0)
// leads and (1,1) closes the curve. Trapezoidal area equals roc_auc.
inline CurvePoints roc_curve(const std::vector<double>& scores, const std::vector<double>& labels) {
  detail::check_scores(scores, labels);
  auto [pos, neg] = detail::class_counts(labels);
  if (pos == 0 || neg == 0)
    raise(ErrorCode::SingleClassInput, "ROC curve needs both classes present");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  CurvePoints curve;
  curve.kind = CurveKind::roc;
  curve.points.emplace_back(0.0, 0.0);
  std::uint64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) (labels[order[k]] > 0.5 ? tp : fp) += 1;
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos));
    i = j;
  }
  if (curve.points.back() != std::make_pair(1.0, 1.0)) curve.points.emplace_back(1.0, 1.0);
  return curve;
}

inline double trapezoid_area(const CurvePoints& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    auto [x0, y0] = curve.points[i - 1];
    auto [x1, y1] = curve.points[i];
    area += (x1 - x0) * (y0 + y1) / 2.0;
  }
  return area;
}

namespace detail {

// Descending score; ties broken by ascending row id (or input position when
// ids are absent) so rankings agree across implementations.
inline std::vector<std::size_t> ranking_order(const std::vector<double>& scores,
                                              const std::vector<std::string>* row_ids) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (row_ids) return (*row_ids)[a] < (*row_ids)[b];
    return a < b;
  });
  return order;
}

}  // namespace detail

// Average precision: mean of precision-at-rank over the ranks of positives.
inline double pr_auc(const std::vector<double>& scores, const std::vector<double>& labels,
                     const std::vector<std::string>* row_ids = nullptr) {
  detail::check_scores(scores, labels);
  auto [pos, neg] = detail::class_counts(labels);
  (void)neg;
  if (pos == 0) raise(ErrorCode::NoPositives, "average precision needs >= 1 positive");
  auto order = detail::ranking_order(scores, row_ids);
  double ap = 0.0;
  std::uint64_t seen_pos = 0;
  for (std::size_t rank = 1; rank <= order.size(); ++rank) {
    if (labels[order[rank - 1]] > 0.5) {
      ++seen_pos;
      ap += static_cast<double>(seen_pos) / static_cast<double>(rank);
    }
  }
  return ap / static_cast<double>(pos);
}

// One (recall, precision) point per rank under the same ordering pr_auc uses;
// the step integral of these points is exactly the average precision.
inline CurvePoints pr_curve(const std::vector<double>& scores, const std::vector<double>& labels,
                            const std::vector<std::string>* row_ids = nullptr) {
  detail::check_scores(scores, labels);
  auto [pos, neg] = detail::class_counts(labels);
  (void)neg;
  if (pos == 0) raise(ErrorCode::NoPositives, "PR curve needs >= 1 positive");
  auto order = detail::ranking_order(scores, row_ids);
  CurvePoints curve;
  curve.kind = CurveKind::pr;
  std::uint64_t seen_pos = 0;
  for (std::size_t rank = 1; rank <= order.size(); ++rank) {
    if (labels[order[rank - 1]] > 0.5) ++seen_pos;
    curve.points.emplace_back(static_cast<double>(seen_pos) / static_cast<double>(pos),
                              static_cast<double>(seen_pos) / static_cast<double>(rank));
  }
  return curve;
}

inline ConfusionCounts confusion_counts(const std::vector<double>& scores,
                                        const std::vector<double>& labels, double threshold) {
  detail::check_scores(scores, labels);
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool predicted = scores[i] >= threshold;
    bool actual = labels[i] > 0.5;
    if (predicted && actual) ++c.tp;
    else if (predicted && !actual) ++c.fp;
    else if (!predicted && actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

// Thresholded accuracy/precision/recall/F1; degenerate denominators yield 0.
inline MetricsRow confusion_metrics(const std::vector<double>& scores,
                                    const std::vector<double>& labels, double threshold = 0.5) {
  ConfusionCounts c = confusion_counts(scores, labels, threshold);
  MetricsRow row;
  row.threshold = threshold;
  double n = static_cast<double>(c.tp + c.fp + c.tn + c.fn);
  row.accuracy = n == 0.0 ? 0.0 : static_cast<double>(c.tp + c.tn) / n;
  row.precision = (c.tp + c.fp) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  row.recall = (c.tp + c.fn) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  row.f1 = (row.precision + row.recall) == 0.0
               ? 0.0
               : 2.0 * row.precision * row.recall / (row.precision + row.recall);
  return row;
}

struct ModelScores {
  std::string tag;
  std::vector<double> scores;
};

struct EvaluationReport {
  std::vector<MetricsRow> rows;
  std::vector<CurvePoints> roc_curves;  // aligned with rows
  std::vector<CurvePoints> pr_curves;
  std::size_t selected = 0;  // index of highest validation ROC-AUC
};

// Table-style comparison of several models on one labeled set; the model with
// the highest ROC-AUC is selected (first wins ties).
inline EvaluationReport evaluate_models(const std::vector<ModelScores>& models,
                                        const std::vector<double>& labels,
                                        const std::vector<std::string>& row_ids,
                                        double threshold = 0.5) {
  EvaluationReport report;
  for (const ModelScores& model : models) {
    if (model.scores.size() != labels.size())
      raise(ErrorCode::MisalignedScores,
            "model `" + model.tag + "` has " + std::to_string(model.scores.size()) +
                " scores for " + std::to_string(labels.size()) + " labels");
    MetricsRow row = confusion_metrics(model.scores, labels, threshold);
    row.model_tag = model.tag;
    row.roc_auc = roc_auc(model.scores, labels);
    row.pr_auc = pr_auc(model.scores, labels, row_ids.empty() ? nullptr : &row_ids);
    report.rows.push_back(row);
    report.roc_curves.push_back(roc_curve(model.scores, labels));
    report.pr_curves.push_back(pr_curve(model.scores, labels, row_ids.empty() ? nullptr : &row_ids));
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].roc_auc > report.rows[report.selected].roc_auc) report.selected = i;
  return report;
}

}  // namespace vandet
