#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/learners/extra_trees.hpp"
#include "vandet/learners/gbt.hpp"
#include "vandet/learners/linear.hpp"
#include "vandet/matrix.hpp"
#include "vandet/text.hpp"

namespace vandet {

enum class LearnerKind { lr, ert, gbt };

inline const char* learner_tag(LearnerKind k) {
  switch (k) {
    case LearnerKind::lr: return "lr";
    case LearnerKind::ert: return "ert";
    case LearnerKind::gbt: return "gbt";
  }
  return "?";
}

inline LearnerKind learner_kind_from(const std::string& tag) {
  if (tag == "lr") return LearnerKind::lr;
  if (tag == "ert") return LearnerKind::ert;
  if (tag == "gbt") return LearnerKind::gbt;
  raise(ErrorCode::BadConfigValue, "unknown learner kind `" + tag + "`");
}

// One concrete hyperparameter configuration for one learner kind.
struct LearnerConfig {
  LearnerKind kind = LearnerKind::gbt;
  LrParams lr;
  ErtParams ert;
  GbtParams gbt;

  std::string label() const {
    switch (kind) {
      case LearnerKind::lr:
        return "lr(eta0=" + format_double(lr.eta0) + ",l2=" + format_double(lr.l2) +
               ",epochs=" + std::to_string(lr.epochs) + ")";
      case LearnerKind::ert:
        return "ert(trees=" + std::to_string(ert.n_trees) +
               ",k=" + std::to_string(ert.features_per_split) +
               ",min_leaf=" + std::to_string(ert.min_samples_leaf) + ")";
      case LearnerKind::gbt:
        return "gbt(rounds=" + std::to_string(gbt.rounds) +
               ",eta=" + format_double(gbt.learning_rate) +
               ",depth=" + std::to_string(gbt.max_depth) + ",l2=" + format_double(gbt.l2) +
               ",gamma=" + format_double(gbt.min_split_gain) +
               ",mcw=" + format_double(gbt.min_child_weight) + ")";
    }
    return "?";
  }
};

using FittedModel = std::variant<LinearModel, ExtraTreesForest, GbtEnsemble>;

inline LearnerKind fitted_kind(const FittedModel& model) {
  if (std::holds_alternative<LinearModel>(model)) return LearnerKind::lr;
  if (std::holds_alternative<ExtraTreesForest>(model)) return LearnerKind::ert;
  return LearnerKind::gbt;
}

inline FittedModel fit_learner(const LearnerConfig& cfg, const DesignMatrix& m,
                               std::uint64_t seed, unsigned threads = 1) {
  switch (cfg.kind) {
    case LearnerKind::lr: return lr_fit(m, cfg.lr, seed);
    case LearnerKind::ert: return ert_fit(m, cfg.ert, seed, threads);
    case LearnerKind::gbt: return gbt_fit(m, cfg.gbt, seed, threads);
  }
  raise(ErrorCode::BadConfigValue, "unreachable learner kind");
}

inline std::vector<double> score_model(const FittedModel& model, const DesignMatrix& m,
                                       unsigned threads = 1) {
  if (const auto* lr = std::get_if<LinearModel>(&model)) return lr_score(*lr, m);
  if (const auto* ert = std::get_if<ExtraTreesForest>(&model)) return ert_score(*ert, m, threads);
  return gbt_score(std::get<GbtEnsemble>(model), m, threads);
}

// Default search grids for full-corpus runs; grid.<kind>.* config keys override.
inline std::vector<LearnerConfig> default_grid(LearnerKind kind) {
  std::vector<LearnerConfig> grid;
  switch (kind) {
    case LearnerKind::lr:
      for (double eta0 : {0.01, 0.1})
        for (double l2 : {1e-5, 1e-4}) {
          LearnerConfig c;
          c.kind = kind;
          c.lr.eta0 = eta0;
          c.lr.l2 = l2;
          grid.push_back(c);
        }
      break;
    case LearnerKind::ert:
      for (int trees : {100, 300})
        for (int min_leaf : {1, 5}) {
          LearnerConfig c;
          c.kind = kind;
          c.ert.n_trees = trees;
          c.ert.min_samples_leaf = min_leaf;
          grid.push_back(c);
        }
      break;
    case LearnerKind::gbt:
      for (int depth : {4, 6})
        for (double eta : {0.05, 0.1})
          for (int rounds : {200, 400}) {
            LearnerConfig c;
            c.kind = kind;
            c.gbt.max_depth = depth;
            c.gbt.learning_rate = eta;
            c.gbt.rounds = rounds;
            grid.push_back(c);
          }
      break;
  }
  return grid;
}

}  // namespace vandet
