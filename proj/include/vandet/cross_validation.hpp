#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/features.hpp"
#include "vandet/learners/learner.hpp"
#include "vandet/metrics.hpp"
#include "vandet/parallel.hpp"
#include "vandet/prng.hpp"

namespace vandet {

struct CvResult {
  struct Entry {
    LearnerConfig config;
    std::string config_label;
    std::vector<double> fold_aucs;
    double mean_auc = 0.0;
    double stddev_auc = 0.0;  // population stddev over folds
  };
  std::vector<Entry> entries;  // grid order
  std::size_t best_index = 0;  // argmax mean; first entry wins ties
};

inline std::uint64_t cv_cell_seed(std::uint64_t seed, std::size_t config_index, int fold) {
  return derive_seed(derive_seed(seed, "cv"),
                     config_index * 1024 + static_cast<std::uint64_t>(fold));
}

// Grid search with k-fold cross-validation maximizing ROC-AUC. Works on raw
// sampled rows: the feature pipeline (selection, medians, spam tables) is
// refit inside every fold on that fold's training portion, so held-out rows
// never leak into the fitted state. Cells run independently; the reduction
// is keyed by (config index, fold), so results are thread-count invariant.
inline CvResult cross_validate(const std::vector<RevisionRecord>& train_rows,
                               const FeatureSchema& schema, const FeatureConfig& feature_cfg,
                               const std::vector<LearnerConfig>& grid,
                               const std::vector<int>& fold_of_row, int k,
                               std::uint64_t seed, unsigned threads = 1) {
  if (grid.empty()) raise(ErrorCode::BadConfigValue, "empty hyperparameter grid");
  if (fold_of_row.size() != train_rows.size())
    raise(ErrorCode::MisalignedScores, "fold assignment does not cover the training rows");
  if (k < 2) raise(ErrorCode::BadConfigValue, "k must be >= 2");

  const std::size_t cells = grid.size() * static_cast<std::size_t>(k);
  std::vector<double> cell_auc(cells, 0.0);
  parallel_for(cells, threads, [&](std::size_t cell) {
    const std::size_t ci = cell / static_cast<std::size_t>(k);
    const int fold = static_cast<int>(cell % static_cast<std::size_t>(k));
    std::vector<RevisionRecord> fit_rows, held_rows;
    for (std::size_t i = 0; i < train_rows.size(); ++i)
      (fold_of_row[i] == fold ? held_rows : fit_rows).push_back(train_rows[i]);
    try {
      FeaturePipeline pipeline = fit_feature_pipeline(fit_rows, schema, feature_cfg);
      DesignMatrix fit_m = transform(fit_rows, pipeline);
      DesignMatrix held_m = transform(held_rows, pipeline);
      FittedModel model = fit_learner(grid[ci], fit_m, cv_cell_seed(seed, ci, fold), 1);
      std::vector<double> scores = score_model(model, held_m, 1);
      cell_auc[cell] = roc_auc(scores, held_m.labels);
    } catch (const Error& e) {
      raise(e.code(), std::string(e.what()) + " [config " + grid[ci].label() + ", fold " +
                          std::to_string(fold) + "]");
    }
  });

  CvResult result;
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    CvResult::Entry entry;
    entry.config = grid[ci];
    entry.config_label = grid[ci].label();
    double sum = 0.0;
    for (int fold = 0; fold < k; ++fold) {
      double auc = cell_auc[ci * static_cast<std::size_t>(k) + static_cast<std::size_t>(fold)];
      entry.fold_aucs.push_back(auc);
      sum += auc;
    }
    entry.mean_auc = sum / static_cast<double>(k);
    double var = 0.0;
    for (double auc : entry.fold_aucs) {
      double d = auc - entry.mean_auc;
      var += d * d;
    }
    entry.stddev_auc = std::sqrt(var / static_cast<double>(k));
    result.entries.push_back(std::move(entry));
  }
  for (std::size_t i = 1; i < result.entries.size(); ++i)
    if (result.entries[i].mean_auc > result.entries[result.best_index].mean_auc)
      result.best_index = i;
  return result;
}

}  // namespace vandet
