// vandet — Wikidata vandalism detection pipeline CLI.
// Subcommands: sample, train, select, evaluate, score.
// Exit codes: 0 ok, 2 config error, 3 data error, 4 training error, 5 artifact error.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "vandet/commands.hpp"

namespace {

using vandet::PipelineConfig;

struct CommandContext {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  PipelineConfig build() const {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    return cfg;
  }
};

// Registers the flags shared by every subcommand; stores values as config
// overrides so flag > config file > default everywhere.
void add_common_flags(CLI::App* sub, CommandContext& ctx) {
  sub->add_option("--config", ctx.config_path, "configuration file (key = value lines)");
  auto push = [&ctx](const std::string& key) {
    return [&ctx, key](const std::string& value) { ctx.overrides.emplace_back(key, value); };
  };
  sub->add_option_function<std::string>("--seed", push("seed"), "PRNG seed (u64)");
  sub->add_option_function<std::string>("--output-dir", push("output_dir"), "output directory");
  sub->add_option_function<std::string>("--threads", push("threads"), "worker threads");
  sub->add_option_function<std::string>("--threshold", push("eval.threshold"),
                                        "decision threshold for thresholded metrics");
  sub->add_flag_callback("--skip-bad-rows",
                         [&ctx] { ctx.overrides.emplace_back("skip_bad_rows", "true"); },
                         "skip and count malformed rows instead of aborting");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vandet: train and apply Wikidata vandalism classifiers"};
  app.require_subcommand(1);
  int exit_code = vandet::kExitOk;

  CommandContext sample_ctx, train_ctx, select_ctx, evaluate_ctx, score_ctx;

  CLI::App* sample = app.add_subcommand(
      "sample", "subsample the labeled corpus and write the train/validation split");
  add_common_flags(sample, sample_ctx);
  sample->add_option_function<std::string>(
      "--schema", [&](const std::string& v) { sample_ctx.overrides.emplace_back("schema", v); },
      "schema file (name<TAB>num|cat|drop)");
  sample->add_option_function<std::string>(
      "--data", [&](const std::string& v) { sample_ctx.overrides.emplace_back("data", v); },
      "comma-separated batch feature files");
  sample->add_option_function<std::string>(
      "--truth", [&](const std::string& v) { sample_ctx.overrides.emplace_back("truth", v); },
      "truth file (revision_id<TAB>true|false)");
  sample->add_flag_callback(
      "--has-header",
      [&] { sample_ctx.overrides.emplace_back("has_header", "true"); },
      "batch files start with a header line");
  sample->callback([&] { exit_code = vandet::cmd_sample(sample_ctx.build()); });

  CLI::App* train =
      app.add_subcommand("train", "fit the feature pipeline and one learner on the train split");
  add_common_flags(train, train_ctx);
  train->add_option_function<std::string>(
      "--schema", [&](const std::string& v) { train_ctx.overrides.emplace_back("schema", v); },
      "schema file");
  train->add_option_function<std::string>(
      "--learner", [&](const std::string& v) { train_ctx.overrides.emplace_back("learner.kind", v); },
      "learner kind: lr | ert | gbt");
  train->add_option_function<std::string>(
      "--data", [&](const std::string& v) { train_ctx.overrides.emplace_back("train.data", v); },
      "sampled dataset file (default <output_dir>/sampled.tsv)");
  train->add_option_function<std::string>(
      "--split", [&](const std::string& v) { train_ctx.overrides.emplace_back("train.split", v); },
      "split sidecar file (default <output_dir>/split.tsv)");
  train->callback([&] { exit_code = vandet::cmd_train(train_ctx.build()); });

  CLI::App* select = app.add_subcommand(
      "select", "cross-validated grid search per learner kind; refit and persist each winner");
  add_common_flags(select, select_ctx);
  select->add_option_function<std::string>(
      "--schema", [&](const std::string& v) { select_ctx.overrides.emplace_back("schema", v); },
      "schema file");
  select->add_option_function<std::string>(
      "--learners",
      [&](const std::string& v) { select_ctx.overrides.emplace_back("select.learners", v); },
      "comma-separated learner kinds to search (default lr,ert,gbt)");
  select->add_option_function<std::string>(
      "--data", [&](const std::string& v) { select_ctx.overrides.emplace_back("train.data", v); },
      "sampled dataset file");
  select->add_option_function<std::string>(
      "--split", [&](const std::string& v) { select_ctx.overrides.emplace_back("train.split", v); },
      "split sidecar file");
  select->callback([&] { exit_code = vandet::cmd_select(select_ctx.build()); });

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score artifacts on the validation split; write the report, curves and figures");
  add_common_flags(evaluate, evaluate_ctx);
  std::vector<std::string> artifact_list;
  evaluate->add_option_function<std::string>(
      "--schema", [&](const std::string& v) { evaluate_ctx.overrides.emplace_back("schema", v); },
      "schema file");
  evaluate->add_option("--artifact", artifact_list, "model artifact (repeatable)");
  evaluate->add_option_function<std::string>(
      "--data", [&](const std::string& v) { evaluate_ctx.overrides.emplace_back("train.data", v); },
      "sampled dataset file");
  evaluate->add_option_function<std::string>(
      "--split",
      [&](const std::string& v) { evaluate_ctx.overrides.emplace_back("train.split", v); },
      "split sidecar file");
  evaluate->callback([&] {
    if (!artifact_list.empty()) {
      std::string joined;
      for (const std::string& p : artifact_list) {
        if (!joined.empty()) joined += ",";
        joined += p;
      }
      evaluate_ctx.overrides.emplace_back("evaluate.artifacts", joined);
    }
    exit_code = vandet::cmd_evaluate(evaluate_ctx.build());
  });

  CLI::App* score =
      app.add_subcommand("score", "score raw revision rows with a persisted artifact");
  add_common_flags(score, score_ctx);
  score->add_option_function<std::string>(
      "--artifact",
      [&](const std::string& v) { score_ctx.overrides.emplace_back("score.artifact", v); },
      "model artifact file");
  score->add_option_function<std::string>(
      "--data", [&](const std::string& v) { score_ctx.overrides.emplace_back("score.data", v); },
      "rows to score (raw batch file or sampled.tsv)");
  score->add_option_function<std::string>(
      "--out", [&](const std::string& v) { score_ctx.overrides.emplace_back("score.output", v); },
      "output path (default <output_dir>/scores.tsv)");
  score->add_flag_callback(
      "--has-header", [&] { score_ctx.overrides.emplace_back("has_header", "true"); },
      "data file starts with a header line");
  score->callback([&] { exit_code = vandet::cmd_score(score_ctx.build()); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return vandet::kExitConfig;
  } catch (const vandet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vandet::kExitData;
  }
  return exit_code;
}
