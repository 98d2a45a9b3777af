#pragma once

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <string>
#include <vector>

#include "vandet/config.hpp"
#include "vandet/features.hpp"
#include "vandet/ingest.hpp"
#include "vandet/learners/learner.hpp"
#include "vandet/prng.hpp"

namespace vandet {

// Creation time for provenance stamps. SOURCE_DATE_EPOCH (the
// reproducible-builds convention) wins over the wall clock so that reruns can
// be byte-identical.
inline std::int64_t provenance_timestamp() {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    auto v = parse_int(env);
    if (v) return *v;
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::uint64_t fit_rows = 0;
  std::int64_t created_unix = 0;
};

inline std::string provenance_line(const std::string& file_kind, const Provenance& prov) {
  return "# vandet " + file_kind + " format=1 seed=" + std::to_string(prov.seed) +
         " config_digest=" + prov.config_digest +
         " created=" + std::to_string(prov.created_unix);
}

// Everything inference needs: the raw schema for parsing, the fitted feature
// pipeline, and the fitted learner.
struct TrainedModel {
  static constexpr int kFormatVersion = 1;

  Provenance provenance;
  FeatureSchema schema;  // full raw column layout, dropped columns included
  FeaturePipeline pipeline;
  LearnerConfig config;
  std::uint64_t learner_seed = 0;
  FittedModel model;

  std::string tag() const { return learner_tag(config.kind); }
};

inline std::uint64_t fit_seed(std::uint64_t seed, LearnerKind kind) {
  return derive_seed(seed, std::string("fit:") + learner_tag(kind));
}

inline TrainedModel train_model(const std::vector<RevisionRecord>& train_rows,
                                const FeatureSchema& schema, const FeatureConfig& feature_cfg,
                                const LearnerConfig& learner_cfg, std::uint64_t seed,
                                unsigned threads = 1,
                                const std::vector<RevisionRecord>* spam_rows = nullptr) {
  TrainedModel tm;
  tm.schema = schema;
  tm.pipeline = fit_feature_pipeline(train_rows, schema, feature_cfg, spam_rows);
  tm.config = learner_cfg;
  tm.learner_seed = fit_seed(seed, learner_cfg.kind);
  DesignMatrix matrix = transform(train_rows, tm.pipeline);
  tm.model = fit_learner(learner_cfg, matrix, tm.learner_seed, threads);
  tm.provenance.seed = seed;
  tm.provenance.fit_rows = train_rows.size();
  tm.provenance.created_unix = provenance_timestamp();
  return tm;
}

inline std::vector<double> score_records(const TrainedModel& tm,
                                         const std::vector<RevisionRecord>& rows,
                                         unsigned threads = 1) {
  DesignMatrix matrix = transform(rows, tm.pipeline);
  return score_model(tm.model, matrix, threads);
}

}  // namespace vandet
