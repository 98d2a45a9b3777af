#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/features.hpp"
#include "vandet/learners/learner.hpp"
#include "vandet/prng.hpp"
#include "vandet/sampling.hpp"
#include "vandet/text.hpp"

namespace vandet {

// Flat `key = value` configuration with dotted section keys. Every key has a
// default; a config file and then CLI flags override them. The canonical
// serialization (all keys, sorted, one per line) feeds the config digest that
// every output file records.
class PipelineConfig {
 public:
  PipelineConfig() {
    for (const auto& [key, value] : default_entries()) values_[key] = value;
  }

  static PipelineConfig from_file(const std::string& path) {
    PipelineConfig cfg;
    cfg.load_file(path);
    return cfg;
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::MissingInput, "cannot open config file " + path);
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      std::string_view body = trim(line);
      if (body.empty() || body.front() == '#') continue;
      std::size_t eq = body.find('=');
      if (eq == std::string_view::npos)
        raise(ErrorCode::ConfigParse,
              path + ":" + std::to_string(ln) + ": expected `key = value`");
      std::string key(trim(body.substr(0, eq)));
      std::string value(trim(body.substr(eq + 1)));
      set(key, value);
    }
  }

  void set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end())
      raise(ErrorCode::UnknownConfigKey, "unknown config key `" + key + "`");
    it->second = value;
  }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      raise(ErrorCode::UnknownConfigKey, "unknown config key `" + key + "`");
    return it->second;
  }

  double get_double(const std::string& key) const {
    auto v = parse_double(get(key));
    if (!v) raise(ErrorCode::BadConfigValue, "`" + key + "` must be a number, got `" + get(key) + "`");
    return *v;
  }

  long long get_int(const std::string& key) const {
    auto v = parse_int(get(key));
    if (!v) raise(ErrorCode::BadConfigValue, "`" + key + "` must be an integer, got `" + get(key) + "`");
    return *v;
  }

  bool get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    raise(ErrorCode::BadConfigValue, "`" + key + "` must be true/false, got `" + v + "`");
  }

  // comma-separated list; empty string -> empty list
  std::vector<std::string> get_list(const std::string& key) const {
    std::vector<std::string> items;
    const std::string& raw = get(key);
    std::size_t start = 0;
    while (start <= raw.size()) {
      std::size_t comma = raw.find(',', start);
      if (comma == std::string::npos) comma = raw.size();
      std::string item(trim(std::string_view(raw).substr(start, comma - start)));
      if (!item.empty()) items.push_back(std::move(item));
      start = comma + 1;
      if (comma == raw.size()) break;
    }
    return items;
  }

  // Run-local keys: where outputs go and how many workers run. They cannot
  // change any result byte, so they stay out of the digest — identical
  // experiments hash identically across output directories and thread counts.
  static bool digest_exempt(const std::string& key) {
    return key == "threads" || key == "output_dir" || key == "train.data" ||
           key == "train.split" || key == "evaluate.artifacts" || key == "score.artifact" ||
           key == "score.data" || key == "score.output";
  }

  std::string canonical_text() const {
    std::string out;
    for (const auto& [key, value] : values_) {
      if (digest_exempt(key)) continue;
      out += key;
      out += " = ";
      out += value;
      out += "\n";
    }
    return out;
  }

  std::string run_local_text() const {
    std::string out;
    for (const auto& [key, value] : values_) {
      if (!digest_exempt(key)) continue;
      out += "# run-local: ";
      out += key;
      out += " = ";
      out += value;
      out += "\n";
    }
    return out;
  }

  std::string digest() const { return hex_u64(fnv1a64(canonical_text())); }

  // --- typed views -------------------------------------------------------

  SampleConfig sample_config() const {
    SampleConfig s;
    s.negative_ratio = get_double("sample.negative_ratio");
    s.train_fraction = get_double("sample.train_fraction");
    s.k_folds = static_cast<int>(get_int("sample.k_folds"));
    s.seed = static_cast<std::uint64_t>(get_int("seed"));
    s.clamp_insufficient = get_bool("sample.clamp_negatives");
    s.validate();
    return s;
  }

  FeatureConfig feature_config() const {
    FeatureConfig f;
    f.missingness_threshold = get_double("feature.missingness_threshold");
    f.smoothing_alpha = get_double("feature.smoothing_alpha");
    f.spam_fit_on_presplit = get_bool("feature.spam_fit_on_presplit");
    if (f.missingness_threshold < 0.0 || f.missingness_threshold > 1.0)
      raise(ErrorCode::BadConfigValue, "feature.missingness_threshold must be in [0,1]");
    if (f.smoothing_alpha < 0.0)
      raise(ErrorCode::BadConfigValue, "feature.smoothing_alpha must be >= 0");
    return f;
  }

  LearnerConfig learner_config() const {
    LearnerConfig c;
    c.kind = learner_kind_from(get("learner.kind"));
    c.lr.eta0 = get_double("learner.lr.eta0");
    c.lr.l2 = get_double("learner.lr.l2");
    c.lr.epochs = static_cast<int>(get_int("learner.lr.epochs"));
    c.ert.n_trees = static_cast<int>(get_int("learner.ert.n_trees"));
    c.ert.features_per_split = static_cast<int>(get_int("learner.ert.features_per_split"));
    c.ert.min_samples_leaf = static_cast<int>(get_int("learner.ert.min_samples_leaf"));
    c.gbt.rounds = static_cast<int>(get_int("learner.gbt.rounds"));
    c.gbt.learning_rate = get_double("learner.gbt.learning_rate");
    c.gbt.max_depth = static_cast<int>(get_int("learner.gbt.max_depth"));
    c.gbt.l2 = get_double("learner.gbt.l2");
    c.gbt.min_split_gain = get_double("learner.gbt.min_split_gain");
    c.gbt.min_child_weight = get_double("learner.gbt.min_child_weight");
    return c;
  }

  std::vector<LearnerKind> select_learners() const {
    std::vector<LearnerKind> kinds;
    for (const std::string& tag : get_list("select.learners"))
      kinds.push_back(learner_kind_from(tag));
    if (kinds.empty()) raise(ErrorCode::BadConfigValue, "select.learners is empty");
    return kinds;
  }

  // full factorial over the grid.<kind>.* value lists, in documented order
  std::vector<LearnerConfig> grid_for(LearnerKind kind) const {
    LearnerConfig base = learner_config();
    base.kind = kind;
    std::vector<LearnerConfig> grid{base};
    auto expand_double = [&](const std::string& key, auto setter) {
      std::vector<LearnerConfig> next;
      for (const LearnerConfig& cfg : grid)
        for (const std::string& token : get_list(key)) {
          auto v = parse_double(token);
          if (!v) raise(ErrorCode::BadConfigValue, "`" + key + "`: bad number `" + token + "`");
          LearnerConfig copy = cfg;
          setter(copy, *v);
          next.push_back(copy);
        }
      if (!next.empty()) grid = std::move(next);
    };
    auto expand_int = [&](const std::string& key, auto setter) {
      expand_double(key, [&](LearnerConfig& c, double v) { setter(c, static_cast<int>(v)); });
    };
    switch (kind) {
      case LearnerKind::lr:
        expand_double("grid.lr.eta0", [](LearnerConfig& c, double v) { c.lr.eta0 = v; });
        expand_double("grid.lr.l2", [](LearnerConfig& c, double v) { c.lr.l2 = v; });
        expand_int("grid.lr.epochs", [](LearnerConfig& c, int v) { c.lr.epochs = v; });
        break;
      case LearnerKind::ert:
        expand_int("grid.ert.n_trees", [](LearnerConfig& c, int v) { c.ert.n_trees = v; });
        expand_int("grid.ert.features_per_split",
                   [](LearnerConfig& c, int v) { c.ert.features_per_split = v; });
        expand_int("grid.ert.min_samples_leaf",
                   [](LearnerConfig& c, int v) { c.ert.min_samples_leaf = v; });
        break;
      case LearnerKind::gbt:
        expand_int("grid.gbt.max_depth", [](LearnerConfig& c, int v) { c.gbt.max_depth = v; });
        expand_double("grid.gbt.learning_rate",
                      [](LearnerConfig& c, double v) { c.gbt.learning_rate = v; });
        expand_int("grid.gbt.rounds", [](LearnerConfig& c, int v) { c.gbt.rounds = v; });
        expand_double("grid.gbt.l2", [](LearnerConfig& c, double v) { c.gbt.l2 = v; });
        expand_double("grid.gbt.min_split_gain",
                      [](LearnerConfig& c, double v) { c.gbt.min_split_gain = v; });
        expand_double("grid.gbt.min_child_weight",
                      [](LearnerConfig& c, double v) { c.gbt.min_child_weight = v; });
        break;
    }
    return grid;
  }

  std::uint64_t seed() const { return static_cast<std::uint64_t>(get_int("seed")); }
  unsigned threads() const {
    long long t = get_int("threads");
    if (t < 1) raise(ErrorCode::BadConfigValue, "threads must be >= 1");
    return static_cast<unsigned>(t);
  }

 private:
  static const std::vector<std::pair<std::string, std::string>>& default_entries() {
    static const std::vector<std::pair<std::string, std::string>> defaults = {
        {"schema", ""},
        {"data", ""},
        {"truth", ""},
        {"has_header", "false"},
        {"output_dir", "out"},
        {"seed", "0"},
        {"threads", "1"},
        {"skip_bad_rows", "false"},
        {"sample.negative_ratio", "2.5"},
        {"sample.train_fraction", "0.8"},
        {"sample.k_folds", "5"},
        {"sample.clamp_negatives", "false"},
        {"feature.missingness_threshold", "0.25"},
        {"feature.smoothing_alpha", "10"},
        {"feature.spam_fit_on_presplit", "false"},
        {"learner.kind", "gbt"},
        {"learner.lr.eta0", "0.1"},
        {"learner.lr.l2", "0.0001"},
        {"learner.lr.epochs", "5"},
        {"learner.ert.n_trees", "300"},
        {"learner.ert.features_per_split", "0"},
        {"learner.ert.min_samples_leaf", "1"},
        {"learner.gbt.rounds", "300"},
        {"learner.gbt.learning_rate", "0.1"},
        {"learner.gbt.max_depth", "6"},
        {"learner.gbt.l2", "1"},
        {"learner.gbt.min_split_gain", "0"},
        {"learner.gbt.min_child_weight", "1"},
        {"select.learners", "lr,ert,gbt"},
        {"grid.lr.eta0", "0.01,0.1"},
        {"grid.lr.l2", "1e-05,0.0001"},
        {"grid.lr.epochs", "5"},
        {"grid.ert.n_trees", "100,300"},
        {"grid.ert.features_per_split", "0"},
        {"grid.ert.min_samples_leaf", "1,5"},
        {"grid.gbt.max_depth", "4,6"},
        {"grid.gbt.learning_rate", "0.05,0.1"},
        {"grid.gbt.rounds", "200,400"},
        {"grid.gbt.l2", "1"},
        {"grid.gbt.min_split_gain", "0"},
        {"grid.gbt.min_child_weight", "1"},
        {"eval.threshold", "0.5"},
        {"train.data", ""},
        {"train.split", ""},
        {"evaluate.artifacts", ""},
        {"score.artifact", ""},
        {"score.data", ""},
        {"score.output", ""},
    };
    return defaults;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace vandet
