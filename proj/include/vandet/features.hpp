#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/ingest.hpp"
#include "vandet/matrix.hpp"

namespace vandet {

struct FeatureConfig {
  double missingness_threshold = 0.25;  // strictly-greater fractions are excluded
  double smoothing_alpha = 10.0;        // 0 recovers the raw spam ratio
  // Ablation switch: fit spam tables on the pre-split sample instead of the
  // train split alone. Missingness and medians always come from the train
  // split; cross-validation always refits per fold regardless of this flag.
  bool spam_fit_on_presplit = false;
};

// Fraction of training rows with a missing value, per non-dropped feature.
struct MissingnessReport {
  std::map<std::string, double> fraction;
  std::size_t fitted_on = 0;
};

// Training-set medians for retained numeric features.
struct ImputerState {
  std::map<std::string, double> medians;
  std::size_t fitted_on = 0;
};

// Per categorical value: occurrences n and vandalism occurrences s among the
// training rows where the feature was present; g is the feature's overall
// vandalism rate over those rows. Tables are counted over the same rows the
// model later trains on, so a training row's own label contributes to its
// encoded value (a value seen once on a vandalism row encodes p = 1 at
// alpha = 0); smoothing softens but does not remove that. Cross-validation
// refits tables inside each fold, so held-out scores stay leak-free.
struct SpamStatsTable {
  struct Cell {
    std::uint64_t n = 0;
    std::uint64_t s = 0;
  };
  std::map<std::string, Cell> values;
  double global_rate = 0.0;
  std::uint64_t total_n = 0;
  std::uint64_t total_s = 0;
};

// Smoothed vandalism probability for a value seen n times with s positives:
//   p = (s + alpha*g) / (n + alpha), and exactly g when n == 0.
inline double smoothed_spam_probability(std::uint64_t s, std::uint64_t n, double g, double alpha) {
  if (n == 0) return g;
  double denom = static_cast<double>(n) + alpha;
  if (denom <= 0.0) return g;
  return (static_cast<double>(s) + alpha * g) / denom;
}

inline std::size_t max_source_index(const FeatureSchema& schema) {
  std::size_t mx = 0;
  for (const FeatureDecl& d : schema.decls) mx = std::max(mx, d.source_index);
  return mx;
}

inline MissingnessReport compute_missingness(const std::vector<RevisionRecord>& train_rows,
                                             const FeatureSchema& schema) {
  if (train_rows.empty()) raise(ErrorCode::EmptyTrainingSet, "missingness needs >= 1 training row");
  MissingnessReport report;
  report.fitted_on = train_rows.size();
  for (const FeatureDecl& decl : schema.decls) {
    if (decl.kind == FeatureKind::dropped) continue;
    std::size_t missing = 0;
    for (const RevisionRecord& rec : train_rows)
      if (rec.values[decl.source_index].is_missing()) ++missing;
    report.fraction[decl.name] =
        static_cast<double>(missing) / static_cast<double>(train_rows.size());
  }
  return report;
}

// Keeps features whose training missingness is <= threshold ("more than"
// excludes); schema-dropped features never survive.
inline FeatureSchema select_features(const MissingnessReport& report, double threshold,
                                     const FeatureSchema& schema) {
  FeatureSchema retained;
  for (const FeatureDecl& decl : schema.decls) {
    if (decl.kind == FeatureKind::dropped) continue;
    auto it = report.fraction.find(decl.name);
    if (it == report.fraction.end())
      raise(ErrorCode::SchemaMismatch, "missingness report lacks feature `" + decl.name + "`");
    if (it->second > threshold) continue;
    retained.decls.push_back(decl);  // source_index still points into raw rows
  }
  if (retained.decls.empty())
    raise(ErrorCode::NoFeaturesRetained,
          "every feature exceeds missingness threshold " + format_double(threshold));
  return retained;
}

inline double median_of_sorted(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline ImputerState fit_medians(const std::vector<RevisionRecord>& train_rows,
                                const FeatureSchema& retained) {
  ImputerState state;
  state.fitted_on = train_rows.size();
  for (const FeatureDecl& decl : retained.decls) {
    if (decl.kind != FeatureKind::numeric) continue;
    std::vector<double> present;
    present.reserve(train_rows.size());
    for (const RevisionRecord& rec : train_rows) {
      const Value& v = rec.values[decl.source_index];
      if (!v.is_missing()) present.push_back(v.num);
    }
    if (present.empty())
      raise(ErrorCode::AllMissingFeature,
            "feature `" + decl.name + "` has no observed training values");
    state.medians[decl.name] = median_of_sorted(present);
  }
  return state;
}

inline SpamStatsTable fit_spam_stats(const std::vector<RevisionRecord>& train_rows,
                                     const FeatureDecl& decl) {
  SpamStatsTable table;
  for (const RevisionRecord& rec : train_rows) {
    if (!rec.label)
      raise(ErrorCode::UnlabeledRow,
            "row `" + rec.revision_id + "` lacks a label while fitting spam stats");
    const Value& v = rec.values[decl.source_index];
    if (v.is_missing()) continue;
    SpamStatsTable::Cell& cell = table.values[v.cat];
    ++cell.n;
    ++table.total_n;
    if (*rec.label) {
      ++cell.s;
      ++table.total_s;
    }
  }
  table.global_rate =
      table.total_n == 0 ? 0.0
                         : static_cast<double>(table.total_s) / static_cast<double>(table.total_n);
  return table;
}

// Fitted feature-engineering state: everything transform() needs, fitted on
// training rows only. Indexing into raw rows goes through the retained
// declarations' source_index, so raw files keep their full column layout.
struct FeaturePipeline {
  FeatureSchema retained;
  ImputerState imputer;
  std::map<std::string, SpamStatsTable> spam_tables;  // per retained categorical
  MissingnessReport missingness;                      // diagnostics for the training log
  double alpha = 10.0;

  std::vector<std::string> column_names() const {
    std::vector<std::string> names;
    for (const FeatureDecl& decl : retained.decls) {
      if (decl.kind == FeatureKind::numeric) {
        names.push_back(decl.name);
      } else {
        names.push_back(decl.name + ":spam_prob");
        names.push_back(decl.name + ":spam_count");
      }
    }
    return names;
  }
};

// `spam_rows`, when given, supplies the rows the spam tables are counted
// over (the pre-split ablation); selection and medians always use train_rows.
inline FeaturePipeline fit_feature_pipeline(const std::vector<RevisionRecord>& train_rows,
                                            const FeatureSchema& schema,
                                            const FeatureConfig& cfg,
                                            const std::vector<RevisionRecord>* spam_rows = nullptr) {
  FeaturePipeline p;
  p.alpha = cfg.smoothing_alpha;
  p.missingness = compute_missingness(train_rows, schema);
  p.retained = select_features(p.missingness, cfg.missingness_threshold, schema);
  p.imputer = fit_medians(train_rows, p.retained);
  const std::vector<RevisionRecord>& counting_rows = spam_rows ? *spam_rows : train_rows;
  for (const FeatureDecl& decl : p.retained.decls)
    if (decl.kind == FeatureKind::categorical)
      p.spam_tables[decl.name] = fit_spam_stats(counting_rows, decl);
  return p;
}

// Numeric -> value or median; categorical -> (smoothed spam probability,
// spam count), with unseen and missing values encoded as (g, 0). The output
// is always fully finite.
inline DesignMatrix transform(const std::vector<RevisionRecord>& rows,
                              const FeaturePipeline& pipeline) {
  DesignMatrix m;
  m.column_names = pipeline.column_names();
  m.cols = m.column_names.size();
  m.rows = rows.size();
  m.data.resize(m.rows * m.cols);
  m.row_ids.reserve(rows.size());

  bool all_labeled = !rows.empty();
  for (const RevisionRecord& rec : rows)
    if (!rec.label) all_labeled = false;
  if (all_labeled) m.labels.reserve(rows.size());

  const std::size_t needed_index = max_source_index(pipeline.retained);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const RevisionRecord& rec = rows[r];
    if (rec.values.size() <= needed_index)
      raise(ErrorCode::SchemaMismatch,
            "row `" + rec.revision_id + "` has " + std::to_string(rec.values.size()) +
                " values, retained schema needs index " + std::to_string(needed_index));
    std::size_t c = 0;
    for (const FeatureDecl& decl : pipeline.retained.decls) {
      const Value& v = rec.values[decl.source_index];
      if (decl.kind == FeatureKind::numeric) {
        double x;
        if (v.is_missing()) {
          x = pipeline.imputer.medians.at(decl.name);
        } else if (v.kind != Value::Kind::numeric) {
          raise(ErrorCode::SchemaMismatch,
                "row `" + rec.revision_id + "`: feature `" + decl.name + "` is not numeric");
        } else {
          x = v.num;
        }
        m.at(r, c++) = x;
      } else {
        const SpamStatsTable& table = pipeline.spam_tables.at(decl.name);
        double prob = table.global_rate;
        double count = 0.0;
        if (!v.is_missing()) {
          if (v.kind != Value::Kind::categorical)
            raise(ErrorCode::SchemaMismatch,
                  "row `" + rec.revision_id + "`: feature `" + decl.name + "` is not categorical");
          auto it = table.values.find(v.cat);
          if (it != table.values.end()) {
            prob = smoothed_spam_probability(it->second.s, it->second.n, table.global_rate,
                                             pipeline.alpha);
            count = static_cast<double>(it->second.s);
          }
        }
        m.at(r, c++) = prob;
        m.at(r, c++) = count;
      }
    }
    m.row_ids.push_back(rec.revision_id);
    if (all_labeled) m.labels.push_back(*rec.label ? 1.0 : 0.0);
  }
  return m;
}

}  // namespace vandet
