#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vandet/artifact.hpp"
#include "vandet/config.hpp"
#include "vandet/cross_validation.hpp"
#include "vandet/dataset_io.hpp"
#include "vandet/figures.hpp"
#include "vandet/metrics.hpp"
#include "vandet/pipeline.hpp"
#include "vandet/sampling.hpp"

namespace vandet {

namespace commands_detail {

inline Provenance make_provenance(const PipelineConfig& cfg, std::uint64_t fit_rows = 0) {
  Provenance prov;
  prov.seed = cfg.seed();
  prov.config_digest = cfg.digest();
  prov.fit_rows = fit_rows;
  prov.created_unix = provenance_timestamp();
  return prov;
}

inline std::string output_dir(const PipelineConfig& cfg) {
  std::string dir = cfg.get("output_dir");
  if (dir.empty()) raise(ErrorCode::BadConfigValue, "output_dir must not be empty");
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string resolve(const PipelineConfig& cfg, const std::string& key,
                           const std::string& fallback_name) {
  std::string path = cfg.get(key);
  if (!path.empty()) return path;
  return cfg.get("output_dir") + "/" + fallback_name;
}

// Writes the effective configuration next to the outputs; the digest line is
// a comment, so re-hashing the non-comment lines reproduces it.
inline void write_config_echo(const PipelineConfig& cfg, const std::string& dir) {
  std::ofstream out(dir + "/config_used.conf", std::ios::binary);
  out << "# vandet config digest=" << cfg.digest() << "\n";
  out << cfg.canonical_text();
  out << cfg.run_local_text();
}

struct TrainingInputs {
  FeatureSchema schema;
  std::vector<RevisionRecord> train_rows;
  std::vector<RevisionRecord> validation_rows;
  std::vector<int> train_folds;
  int k = 0;
};

inline TrainingInputs load_training_inputs(const PipelineConfig& cfg) {
  if (cfg.get("schema").empty()) raise(ErrorCode::MissingInput, "config key `schema` is required");
  TrainingInputs in;
  in.schema = load_schema(cfg.get("schema"));
  std::string data_path = resolve(cfg, "train.data", "sampled.tsv");
  std::string split_path = resolve(cfg, "train.split", "split.tsv");
  std::vector<RevisionRecord> rows = read_sampled_file(data_path, in.schema);
  SplitFile split = read_split_file(split_path);
  for (RevisionRecord& rec : rows) {
    auto role = split.role.find(rec.revision_id);
    if (role == split.role.end())
      raise(ErrorCode::ConfigParse,
            "split sidecar " + split_path + " does not cover row `" + rec.revision_id + "`");
    if (role->second == SplitRole::train) {
      auto fold = split.fold.find(rec.revision_id);
      if (fold == split.fold.end() || fold->second < 0)
        raise(ErrorCode::ConfigParse, "train row `" + rec.revision_id + "` has no fold id");
      in.k = std::max(in.k, fold->second + 1);
      in.train_folds.push_back(fold->second);
      in.train_rows.push_back(std::move(rec));
    } else {
      in.validation_rows.push_back(std::move(rec));
    }
  }
  if (in.train_rows.empty()) raise(ErrorCode::EmptyTrainingSet, data_path + " has no train rows");
  return in;
}

inline std::string artifact_tag_from_path(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  if (stem.rfind("model_", 0) == 0) stem = stem.substr(6);
  return stem;
}

}  // namespace commands_detail

// --- sample ---------------------------------------------------------------

// Scan the batch corpus, join labels, keep every positive, subsample
// negatives per the batch-proportional plan, then write the sampled dataset,
// the split/fold sidecar and a per-batch summary.
inline int cmd_sample(const PipelineConfig& cfg, std::ostream& log = std::cout) {
  using namespace commands_detail;
  if (cfg.get("schema").empty()) raise(ErrorCode::MissingInput, "config key `schema` is required");
  if (cfg.get("truth").empty()) raise(ErrorCode::MissingInput, "config key `truth` is required");
  std::vector<std::string> data_paths = cfg.get_list("data");
  if (data_paths.empty()) raise(ErrorCode::MissingInput, "config key `data` lists no batch files");

  FeatureSchema schema = load_schema(cfg.get("schema"));
  TruthMap truth = load_truth(cfg.get("truth"));
  SampleConfig sample_cfg = cfg.sample_config();
  ScanOptions scan_opts;
  scan_opts.has_header = cfg.get_bool("has_header");
  scan_opts.policy =
      cfg.get_bool("skip_bad_rows") ? RowErrorPolicy::skip_and_count : RowErrorPolicy::abort;

  struct BatchStats {
    std::uint64_t rows = 0, skipped = 0, unlabeled = 0;
  };
  std::vector<BatchStats> stats(data_paths.size());
  std::vector<BatchSource> sources;
  for (std::size_t b = 0; b < data_paths.size(); ++b) {
    const std::string& path = data_paths[b];
    std::string batch_id = batch_id_from_path(path);
    sources.push_back(BatchSource{
        batch_id,
        [&, path, batch_id, b](const std::function<void(const RevisionRecord&)>& sink) {
          ScanStats pass;
          TruthMap const& truth_ref = truth;
          LabelJoiner joiner(truth_ref);
          scan_batch_file(path, batch_id, schema, scan_opts,
                          [&](RevisionRecord&& rec) {
                            joiner.apply(rec);
                            sink(rec);
                          },
                          &pass);
          stats[b] = BatchStats{pass.rows, pass.skipped, joiner.unlabeled};
        }});
  }

  SubsampleResult sampled = subsample(sources, sample_cfg, cfg.threads());

  std::vector<std::string> ids;
  ids.reserve(sampled.rows.size());
  for (const RevisionRecord& rec : sampled.rows) ids.push_back(rec.revision_id);
  SplitAssignment split = train_val_split(ids, sample_cfg);
  std::vector<std::pair<std::string, bool>> train_ids;
  for (const RevisionRecord& rec : sampled.rows)
    if (split.role.at(rec.revision_id) == SplitRole::train)
      train_ids.emplace_back(rec.revision_id, *rec.label);
  auto folds = kfold_assign(train_ids, sample_cfg.k_folds, derive_seed(sample_cfg.seed, "folds"));

  std::string dir = output_dir(cfg);
  Provenance prov = make_provenance(cfg, sampled.rows.size());
  write_sampled_file(dir + "/sampled.tsv", sampled.rows, schema, prov);
  write_split_file(dir + "/split.tsv", sampled.rows, split, folds, prov);
  write_config_echo(cfg, dir);

  {
    std::ofstream out(dir + "/sample_summary.tsv", std::ios::binary);
    out << provenance_line("sample-summary", prov) << "\n";
    out << "# negative_ratio=" << format_double(sample_cfg.negative_ratio)
        << " target=" << sampled.plan.total_negatives_target
        << " clamped=" << (sampled.plan.clamped ? 1 : 0) << "\n";
    out << "batch_id\trows\tpositives\tnegatives\tnegative_quota\tnegatives_sampled\t"
           "unlabeled\tskipped\n";
    std::uint64_t total_rows = 0, total_unlabeled = 0, total_skipped = 0, total_sampled = 0;
    for (std::size_t b = 0; b < sources.size(); ++b) {
      const std::string& batch = sources[b].batch_id;
      out << batch << '\t' << stats[b].rows << '\t' << sampled.per_batch_positives.at(batch)
          << '\t' << sampled.per_batch_negatives.at(batch) << '\t'
          << sampled.plan.per_batch_negative_quota.at(batch) << '\t'
          << sampled.per_batch_sampled_negatives.at(batch) << '\t' << stats[b].unlabeled << '\t'
          << stats[b].skipped << '\n';
      total_rows += stats[b].rows;
      total_unlabeled += stats[b].unlabeled;
      total_skipped += stats[b].skipped;
      total_sampled += sampled.per_batch_sampled_negatives.at(batch);
    }
    out << "TOTAL\t" << total_rows << '\t' << sampled.plan.total_positives << '\t'
        << (total_rows - sampled.plan.total_positives - total_unlabeled) << '\t'
        << sampled.plan.total_negatives_target << '\t' << total_sampled << '\t'
        << total_unlabeled << '\t' << total_skipped << '\n';
  }

  log << "sampled " << sampled.rows.size() << " rows (" << sampled.plan.total_positives
      << " positives scanned, " << sampled.plan.total_negatives_target << " negatives drawn"
      << (sampled.plan.clamped ? ", clamped" : "") << ") into " << dir << "\n";
  return kExitOk;
}

// --- train ------------------------------------------------------------------

inline void write_train_log(const std::string& path, const TrainedModel& tm,
                            const FeatureConfig& fcfg, const Provenance& prov) {
  std::ofstream out(path, std::ios::binary);
  out << provenance_line("train-log", prov) << "\n";
  out << "# columns: feature\tkind\tmissing_fraction\tstatus\tmedian\n";
  std::set<std::string> retained;
  for (const FeatureDecl& decl : tm.pipeline.retained.decls) retained.insert(decl.name);
  for (const FeatureDecl& decl : tm.schema.decls) {
    out << decl.name << '\t' << feature_kind_token(decl.kind) << '\t';
    if (decl.kind == FeatureKind::dropped) {
      out << "-\texcluded:dropped\t-\n";
      continue;
    }
    double fraction = tm.pipeline.missingness.fraction.at(decl.name);
    out << format_double(fraction) << '\t';
    if (!retained.count(decl.name)) {
      out << "excluded:missingness>" << format_double(fcfg.missingness_threshold) << "\t-\n";
    } else if (decl.kind == FeatureKind::numeric) {
      out << "retained\t" << format_double(tm.pipeline.imputer.medians.at(decl.name)) << "\n";
    } else {
      out << "retained\t-\n";
    }
  }
}

// Fit the feature pipeline and the configured learner on the train split and
// persist the artifact.
inline int cmd_train(const PipelineConfig& cfg, std::ostream& log = std::cout) {
  using namespace commands_detail;
  TrainingInputs in = load_training_inputs(cfg);
  FeatureConfig fcfg = cfg.feature_config();
  LearnerConfig lcfg = cfg.learner_config();
  std::vector<RevisionRecord> presplit;
  const std::vector<RevisionRecord>* spam_rows = nullptr;
  if (fcfg.spam_fit_on_presplit) {
    presplit = in.train_rows;
    presplit.insert(presplit.end(), in.validation_rows.begin(), in.validation_rows.end());
    spam_rows = &presplit;
  }
  TrainedModel tm = train_model(in.train_rows, in.schema, fcfg, lcfg, cfg.seed(),
                                cfg.threads(), spam_rows);
  tm.provenance.config_digest = cfg.digest();

  std::string dir = output_dir(cfg);
  std::string artifact_path = dir + "/model_" + tm.tag() + ".json";
  save_artifact(tm, artifact_path);
  write_train_log(dir + "/train_log.txt", tm, fcfg, tm.provenance);
  write_config_echo(cfg, dir);
  log << "trained " << tm.tag() << " on " << in.train_rows.size() << " rows ("
      << tm.pipeline.retained.size() << " features retained) -> " << artifact_path << "\n";
  return kExitOk;
}

// --- select -----------------------------------------------------------------

// Cross-validated grid search per learner kind; each kind's winner is refit
// on the full train split and persisted like cmd_train would.
inline int cmd_select(const PipelineConfig& cfg, std::ostream& log = std::cout) {
  using namespace commands_detail;
  TrainingInputs in = load_training_inputs(cfg);
  if (in.k < 2) raise(ErrorCode::ConfigParse, "split sidecar carries no usable fold ids");
  FeatureConfig fcfg = cfg.feature_config();
  std::vector<RevisionRecord> presplit;
  const std::vector<RevisionRecord>* spam_rows = nullptr;
  if (fcfg.spam_fit_on_presplit) {
    presplit = in.train_rows;
    presplit.insert(presplit.end(), in.validation_rows.begin(), in.validation_rows.end());
    spam_rows = &presplit;
  }
  std::string dir = output_dir(cfg);
  Provenance prov = make_provenance(cfg, in.train_rows.size());

  std::ofstream cv_out(dir + "/cv_results.tsv", std::ios::binary);
  cv_out << provenance_line("cv-results", prov) << "\n";
  cv_out << "kind\tconfig\tmean_roc_auc\tstddev_roc_auc\tfold_aucs\tselected\n";

  for (LearnerKind kind : cfg.select_learners()) {
    std::vector<LearnerConfig> grid = cfg.grid_for(kind);
    CvResult cv = cross_validate(in.train_rows, in.schema, fcfg, grid, in.train_folds, in.k,
                                 cfg.seed(), cfg.threads());
    for (std::size_t i = 0; i < cv.entries.size(); ++i) {
      const auto& entry = cv.entries[i];
      cv_out << learner_tag(kind) << '\t' << entry.config_label << '\t'
             << format_fixed(entry.mean_auc, 6) << '\t' << format_fixed(entry.stddev_auc, 6)
             << '\t';
      for (std::size_t f = 0; f < entry.fold_aucs.size(); ++f)
        cv_out << (f ? "," : "") << format_fixed(entry.fold_aucs[f], 6);
      cv_out << '\t' << (i == cv.best_index ? 1 : 0) << '\n';
    }
    const LearnerConfig& winner = cv.entries[cv.best_index].config;
    TrainedModel tm = train_model(in.train_rows, in.schema, fcfg, winner, cfg.seed(),
                                  cfg.threads(), spam_rows);
    tm.provenance.config_digest = cfg.digest();
    std::string artifact_path = dir + "/model_" + tm.tag() + ".json";
    save_artifact(tm, artifact_path);
    log << "selected " << cv.entries[cv.best_index].config_label << " (mean CV ROC-AUC "
        << format_fixed(cv.entries[cv.best_index].mean_auc, 4) << ") -> " << artifact_path
        << "\n";
  }
  write_config_echo(cfg, dir);
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

inline int cmd_evaluate(const PipelineConfig& cfg, std::ostream& log = std::cout) {
  using namespace commands_detail;
  TrainingInputs in = load_training_inputs(cfg);
  std::vector<std::string> artifact_paths = cfg.get_list("evaluate.artifacts");
  if (artifact_paths.empty())
    raise(ErrorCode::MissingInput, "evaluate.artifacts lists no model files");
  if (in.validation_rows.empty())
    raise(ErrorCode::EmptyTrainingSet, "no validation rows in the split");

  std::vector<double> labels;
  std::vector<std::string> ids;
  for (const RevisionRecord& rec : in.validation_rows) {
    labels.push_back(*rec.label ? 1.0 : 0.0);
    ids.push_back(rec.revision_id);
  }

  std::vector<ModelScores> models;
  std::set<std::string> used_tags;
  for (const std::string& path : artifact_paths) {
    TrainedModel tm = load_artifact(path);
    if (tm.schema != in.schema)
      raise(ErrorCode::SchemaMismatch,
            "artifact " + path + " was fitted on a different raw schema");
    std::string tag = artifact_tag_from_path(path);
    while (used_tags.count(tag)) tag += "+";
    used_tags.insert(tag);
    models.push_back(ModelScores{tag, score_records(tm, in.validation_rows, cfg.threads())});
  }

  double threshold = cfg.get_double("eval.threshold");
  EvaluationReport report = evaluate_models(models, labels, ids, threshold);

  std::string dir = output_dir(cfg);
  Provenance prov = make_provenance(cfg, in.validation_rows.size());
  std::uint64_t positives = 0;
  for (double y : labels)
    if (y > 0.5) ++positives;

  {
    std::ofstream out(dir + "/report.tsv", std::ios::binary);
    out << provenance_line("report", prov) << " threshold=" << format_double(threshold)
        << " rows=" << labels.size() << " positives=" << positives << " prevalence="
        << format_fixed(static_cast<double>(positives) / static_cast<double>(labels.size()), 4)
        << " selected=" << models[report.selected].tag << "\n";
    out << "model\tROC\tPR\tACC\tP\tR\tF\n";
    for (const MetricsRow& row : report.rows) {
      out << row.model_tag << '\t' << format_fixed(row.roc_auc, 4) << '\t'
          << format_fixed(row.pr_auc, 4) << '\t' << format_fixed(row.accuracy, 4) << '\t'
          << format_fixed(row.precision, 4) << '\t' << format_fixed(row.recall, 4) << '\t'
          << format_fixed(row.f1, 4) << '\n';
    }
  }

  std::vector<std::string> tags;
  std::vector<double> roc_aucs, pr_aucs;
  for (std::size_t m = 0; m < models.size(); ++m) {
    const std::string& tag = models[m].tag;
    tags.push_back(tag);
    roc_aucs.push_back(report.rows[m].roc_auc);
    pr_aucs.push_back(report.rows[m].pr_auc);
    {
      std::ofstream out(dir + "/roc_" + tag + ".tsv", std::ios::binary);
      out << provenance_line("roc-curve", prov) << " model=" << tag << "\n";
      out << "fpr\ttpr\n";
      for (auto [x, y] : report.roc_curves[m].points)
        out << format_double(x) << '\t' << format_double(y) << '\n';
    }
    {
      std::ofstream out(dir + "/pr_" + tag + ".tsv", std::ios::binary);
      out << provenance_line("pr-curve", prov) << " model=" << tag << "\n";
      out << "recall\tprecision\n";
      for (auto [x, y] : report.pr_curves[m].points)
        out << format_double(x) << '\t' << format_double(y) << '\n';
    }
    write_scores_file(dir + "/scores_" + tag + ".tsv", ids, models[m].scores, prov);
  }
  write_curve_figure(dir + "/roc.svg", CurveKind::roc, tags, report.roc_curves, roc_aucs,
                     provenance_line("roc-figure", prov));
  write_curve_figure(dir + "/pr.svg", CurveKind::pr, tags, report.pr_curves, pr_aucs,
                     provenance_line("pr-figure", prov));

  log << "selected " << models[report.selected].tag << " (validation ROC-AUC "
      << format_fixed(report.rows[report.selected].roc_auc, 4) << ")\n";
  return kExitOk;
}

// --- score ------------------------------------------------------------------

inline int cmd_score(const PipelineConfig& cfg, std::ostream& log = std::cout) {
  using namespace commands_detail;
  std::string artifact_path = cfg.get("score.artifact");
  std::string data_path = cfg.get("score.data");
  if (artifact_path.empty()) raise(ErrorCode::MissingInput, "score.artifact is required");
  if (data_path.empty()) raise(ErrorCode::MissingInput, "score.data is required");
  TrainedModel tm = load_artifact(artifact_path);

  std::vector<RevisionRecord> rows;
  {
    std::ifstream probe(data_path);
    if (!probe) raise(ErrorCode::MissingInput, "cannot open data file " + data_path);
    std::string first;
    std::getline(probe, first);
    probe.close();
    if (first.rfind(kSampledMagic, 0) == 0) {
      rows = read_sampled_file(data_path, tm.schema);
    } else {
      ScanOptions opts;
      opts.has_header = cfg.get_bool("has_header");
      opts.policy = cfg.get_bool("skip_bad_rows") ? RowErrorPolicy::skip_and_count
                                                  : RowErrorPolicy::abort;
      scan_batch_file(data_path, batch_id_from_path(data_path), tm.schema, opts,
                      [&](RevisionRecord&& rec) { rows.push_back(std::move(rec)); });
    }
  }

  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (const RevisionRecord& rec : rows) ids.push_back(rec.revision_id);
  std::vector<double> scores = score_records(tm, rows, cfg.threads());

  std::string out_path = cfg.get("score.output");
  if (out_path.empty()) out_path = output_dir(cfg) + "/scores.tsv";
  write_scores_file(out_path, ids, scores, make_provenance(cfg, rows.size()));
  log << "scored " << rows.size() << " rows -> " << out_path << "\n";
  return kExitOk;
}

}  // namespace vandet
