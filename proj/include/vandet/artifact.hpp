#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vandet/error.hpp"
#include "vandet/pipeline.hpp"

namespace vandet {

// Model persistence. The artifact is one canonical JSON document (insertion
// order preserved, 1-space indent, shortest round-trip numbers), so
// save(load(save(x))) is byte-identical and any language with a JSON parser
// can read a model. format_version is the first field and is checked on load.
using ordered_json = nlohmann::ordered_json;

namespace artifact_detail {

inline ordered_json trees_to_json(const std::vector<Tree>& trees, bool with_counts) {
  ordered_json arr = ordered_json::array();
  for (const Tree& tree : trees) {
    ordered_json t;
    ordered_json feature = ordered_json::array(), threshold = ordered_json::array(),
                 left = ordered_json::array(), right = ordered_json::array(),
                 value = ordered_json::array(), counts = ordered_json::array();
    for (const TreeNode& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
      counts.push_back(node.n_samples);
    }
    t["feature"] = std::move(feature);
    t["threshold"] = std::move(threshold);
    t["left"] = std::move(left);
    t["right"] = std::move(right);
    t["value"] = std::move(value);
    if (with_counts) t["n_samples"] = std::move(counts);
    arr.push_back(std::move(t));
  }
  return arr;
}

inline std::vector<Tree> trees_from_json(const ordered_json& arr) {
  std::vector<Tree> trees;
  for (const auto& t : arr) {
    Tree tree;
    const auto& feature = t.at("feature");
    std::size_t n = feature.size();
    tree.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      TreeNode& node = tree.nodes[i];
      node.feature = t.at("feature")[i].get<std::int32_t>();
      node.threshold = t.at("threshold")[i].get<double>();
      node.left = t.at("left")[i].get<std::int32_t>();
      node.right = t.at("right")[i].get<std::int32_t>();
      node.value = t.at("value")[i].get<double>();
      if (t.contains("n_samples")) node.n_samples = t.at("n_samples")[i].get<std::uint32_t>();
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

inline ordered_json model_to_json(const TrainedModel& tm) {
  ordered_json learner;
  learner["kind"] = tm.tag();
  learner["seed"] = tm.learner_seed;
  switch (tm.config.kind) {
    case LearnerKind::lr: {
      const auto& model = std::get<LinearModel>(tm.model);
      learner["params"] = {{"eta0", tm.config.lr.eta0},
                           {"l2", tm.config.lr.l2},
                           {"epochs", tm.config.lr.epochs}};
      ordered_json payload;
      payload["weights"] = model.weights;
      payload["bias"] = model.bias;
      payload["means"] = model.means;
      payload["stds"] = model.stds;
      learner["model"] = std::move(payload);
      break;
    }
    case LearnerKind::ert: {
      const auto& forest = std::get<ExtraTreesForest>(tm.model);
      learner["params"] = {{"n_trees", tm.config.ert.n_trees},
                           {"features_per_split", tm.config.ert.features_per_split},
                           {"min_samples_leaf", tm.config.ert.min_samples_leaf}};
      ordered_json payload;
      payload["n_features"] = forest.n_features;
      payload["trees"] = trees_to_json(forest.trees, true);
      learner["model"] = std::move(payload);
      break;
    }
    case LearnerKind::gbt: {
      const auto& ensemble = std::get<GbtEnsemble>(tm.model);
      learner["params"] = {{"rounds", tm.config.gbt.rounds},
                           {"learning_rate", tm.config.gbt.learning_rate},
                           {"max_depth", tm.config.gbt.max_depth},
                           {"l2", tm.config.gbt.l2},
                           {"min_split_gain", tm.config.gbt.min_split_gain},
                           {"min_child_weight", tm.config.gbt.min_child_weight}};
      ordered_json payload;
      payload["base_score"] = ensemble.base_score;
      payload["n_features"] = ensemble.n_features;
      payload["trees"] = trees_to_json(ensemble.trees, true);
      learner["model"] = std::move(payload);
      break;
    }
  }
  return learner;
}

}  // namespace artifact_detail

inline ordered_json artifact_to_json(const TrainedModel& tm) {
  ordered_json doc;
  doc["format_version"] = TrainedModel::kFormatVersion;
  ordered_json prov;
  prov["seed"] = tm.provenance.seed;
  prov["config_digest"] = tm.provenance.config_digest;
  prov["fit_rows"] = tm.provenance.fit_rows;
  prov["created_unix"] = tm.provenance.created_unix;
  doc["provenance"] = std::move(prov);

  ordered_json schema = ordered_json::array();
  for (const FeatureDecl& decl : tm.schema.decls)
    schema.push_back({{"name", decl.name}, {"kind", feature_kind_token(decl.kind)}});
  doc["schema"] = std::move(schema);

  ordered_json pipeline;
  pipeline["alpha"] = tm.pipeline.alpha;
  ordered_json retained = ordered_json::array();
  for (const FeatureDecl& decl : tm.pipeline.retained.decls) retained.push_back(decl.name);
  pipeline["retained"] = std::move(retained);
  ordered_json missingness;  // std::map iteration: sorted by feature name
  for (const auto& [name, frac] : tm.pipeline.missingness.fraction) missingness[name] = frac;
  pipeline["missingness"] = std::move(missingness);
  ordered_json medians;
  for (const auto& [name, median] : tm.pipeline.imputer.medians) medians[name] = median;
  pipeline["medians"] = std::move(medians);
  ordered_json tables;
  for (const auto& [name, table] : tm.pipeline.spam_tables) {
    ordered_json t;
    t["global_rate"] = table.global_rate;
    t["total_n"] = table.total_n;
    t["total_s"] = table.total_s;
    ordered_json values;
    for (const auto& [value, cell] : table.values) values[value] = {cell.n, cell.s};
    t["values"] = std::move(values);
    tables[name] = std::move(t);
  }
  pipeline["spam_tables"] = std::move(tables);
  doc["pipeline"] = std::move(pipeline);

  doc["learner"] = artifact_detail::model_to_json(tm);
  return doc;
}

inline TrainedModel artifact_from_json(const ordered_json& doc) {
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
    raise(ErrorCode::ArtifactParse, "missing format_version");
  int version = doc["format_version"].get<int>();
  if (version != TrainedModel::kFormatVersion)
    raise(ErrorCode::ArtifactVersion, "artifact format_version " + std::to_string(version) +
                                          " unsupported (expected " +
                                          std::to_string(TrainedModel::kFormatVersion) + ")");
  TrainedModel tm;
  try {
    const auto& prov = doc.at("provenance");
    tm.provenance.seed = prov.at("seed").get<std::uint64_t>();
    tm.provenance.config_digest = prov.at("config_digest").get<std::string>();
    tm.provenance.fit_rows = prov.at("fit_rows").get<std::uint64_t>();
    tm.provenance.created_unix = prov.at("created_unix").get<std::int64_t>();

    std::vector<std::string> lines;
    for (const auto& decl : doc.at("schema"))
      lines.push_back(decl.at("name").get<std::string>() + "\t" +
                      decl.at("kind").get<std::string>());
    tm.schema = parse_schema_lines(lines, "artifact schema");

    const auto& pipeline = doc.at("pipeline");
    tm.pipeline.alpha = pipeline.at("alpha").get<double>();
    for (const auto& name : pipeline.at("retained")) {
      bool matched = false;
      for (const FeatureDecl& decl : tm.schema.decls)
        if (decl.name == name.get<std::string>()) {
          tm.pipeline.retained.decls.push_back(decl);
          matched = true;
          break;
        }
      if (!matched)
        raise(ErrorCode::ArtifactParse,
              "retained feature `" + name.get<std::string>() + "` not in schema");
    }
    for (const auto& [name, frac] : pipeline.at("missingness").items())
      tm.pipeline.missingness.fraction[name] = frac.get<double>();
    for (const auto& [name, median] : pipeline.at("medians").items())
      tm.pipeline.imputer.medians[name] = median.get<double>();
    for (const auto& [name, t] : pipeline.at("spam_tables").items()) {
      SpamStatsTable table;
      table.global_rate = t.at("global_rate").get<double>();
      table.total_n = t.at("total_n").get<std::uint64_t>();
      table.total_s = t.at("total_s").get<std::uint64_t>();
      for (const auto& [value, cell] : t.at("values").items())
        table.values[value] = {cell.at(0).get<std::uint64_t>(), cell.at(1).get<std::uint64_t>()};
      tm.pipeline.spam_tables[name] = std::move(table);
    }

    const auto& learner = doc.at("learner");
    tm.config.kind = learner_kind_from(learner.at("kind").get<std::string>());
    tm.learner_seed = learner.at("seed").get<std::uint64_t>();
    const auto& params = learner.at("params");
    const auto& payload = learner.at("model");
    switch (tm.config.kind) {
      case LearnerKind::lr: {
        tm.config.lr.eta0 = params.at("eta0").get<double>();
        tm.config.lr.l2 = params.at("l2").get<double>();
        tm.config.lr.epochs = params.at("epochs").get<int>();
        LinearModel model;
        model.weights = payload.at("weights").get<std::vector<double>>();
        model.bias = payload.at("bias").get<double>();
        model.means = payload.at("means").get<std::vector<double>>();
        model.stds = payload.at("stds").get<std::vector<double>>();
        model.params = tm.config.lr;
        model.seed = tm.learner_seed;
        tm.model = std::move(model);
        break;
      }
      case LearnerKind::ert: {
        tm.config.ert.n_trees = params.at("n_trees").get<int>();
        tm.config.ert.features_per_split = params.at("features_per_split").get<int>();
        tm.config.ert.min_samples_leaf = params.at("min_samples_leaf").get<int>();
        ExtraTreesForest forest;
        forest.n_features = payload.at("n_features").get<std::size_t>();
        forest.trees = artifact_detail::trees_from_json(payload.at("trees"));
        forest.params = tm.config.ert;
        forest.seed = tm.learner_seed;
        tm.model = std::move(forest);
        break;
      }
      case LearnerKind::gbt: {
        tm.config.gbt.rounds = params.at("rounds").get<int>();
        tm.config.gbt.learning_rate = params.at("learning_rate").get<double>();
        tm.config.gbt.max_depth = params.at("max_depth").get<int>();
        tm.config.gbt.l2 = params.at("l2").get<double>();
        tm.config.gbt.min_split_gain = params.at("min_split_gain").get<double>();
        tm.config.gbt.min_child_weight = params.at("min_child_weight").get<double>();
        GbtEnsemble ensemble;
        ensemble.base_score = payload.at("base_score").get<double>();
        ensemble.n_features = payload.at("n_features").get<std::size_t>();
        ensemble.trees = artifact_detail::trees_from_json(payload.at("trees"));
        ensemble.params = tm.config.gbt;
        ensemble.seed = tm.learner_seed;
        tm.model = std::move(ensemble);
        break;
      }
    }
  } catch (const ordered_json::exception& e) {
    raise(ErrorCode::ArtifactParse, std::string("malformed artifact: ") + e.what());
  }
  return tm;
}

inline void save_artifact(const TrainedModel& tm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::ArtifactIo, "cannot write artifact " + path);
  out << artifact_to_json(tm).dump(1) << "\n";
  if (!out) raise(ErrorCode::ArtifactIo, "failed writing artifact " + path);
}

inline TrainedModel load_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::ArtifactIo, "cannot open artifact " + path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const ordered_json::exception& e) {
    raise(ErrorCode::ArtifactParse, std::string("artifact is not valid JSON: ") + e.what());
  }
  return artifact_from_json(doc);
}

}  // namespace vandet
