#include <doctest.h>

#include <string>

#include "test_support.hpp"
#include "vandet/config.hpp"

using namespace vandet;
using test_support::TempDir;

TEST_CASE("config files parse key = value lines with comments") {
  TempDir dir("config");
  std::string path = dir.write_file("run.conf",
                                    "# pipeline settings\n"
                                    "seed = 99\n"
                                    "sample.negative_ratio = 3.5\n"
                                    "\n"
                                    "learner.kind = ert\n");
  PipelineConfig cfg = PipelineConfig::from_file(path);
  CHECK(cfg.seed() == 99);
  CHECK(cfg.sample_config().negative_ratio == 3.5);
  CHECK(cfg.learner_config().kind == LearnerKind::ert);
  // untouched keys keep their defaults
  CHECK(cfg.get("sample.train_fraction") == "0.8");
  CHECK(cfg.get_double("eval.threshold") == 0.5);
}

TEST_CASE("unknown keys and malformed lines are config errors") {
  TempDir dir("config2");
  PipelineConfig cfg;
  bool caught = false;
  try {
    cfg.set("sample.negativ_ratio", "2.5");  // typo
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::UnknownConfigKey);
    CHECK(e.exit_code() == kExitConfig);
  }
  CHECK(caught);

  std::string path = dir.write_file("bad.conf", "seed 42\n");
  caught = false;
  try {
    PipelineConfig::from_file(path);
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::ConfigParse);
  }
  CHECK(caught);
}

TEST_CASE("typed getters validate values") {
  PipelineConfig cfg;
  cfg.set("seed", "not-a-number");
  bool caught = false;
  try {
    cfg.seed();
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::BadConfigValue);
  }
  CHECK(caught);

  cfg.set("sample.train_fraction", "1.5");
  caught = false;
  try {
    cfg.sample_config();
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::BadConfigValue);
  }
  CHECK(caught);
}

TEST_CASE("digest covers the effective config and is recomputable") {
  PipelineConfig a, b;
  CHECK(a.digest() == b.digest());
  b.set("seed", "7");
  CHECK(a.digest() != b.digest());
  // recomputation from the canonical text matches
  CHECK(b.digest() == hex_u64(fnv1a64(b.canonical_text())));
  // setting a value back to its default restores the digest
  b.set("seed", "0");
  CHECK(a.digest() == b.digest());
}

TEST_CASE("list parsing splits on commas and trims") {
  PipelineConfig cfg;
  cfg.set("data", "a.tsv, b.tsv ,c.tsv");
  CHECK(cfg.get_list("data") == std::vector<std::string>{"a.tsv", "b.tsv", "c.tsv"});
  cfg.set("data", "");
  CHECK(cfg.get_list("data").empty());
}

TEST_CASE("default grids match the documented sizes") {
  PipelineConfig cfg;
  CHECK(cfg.grid_for(LearnerKind::lr).size() == 4);    // 2 eta0 x 2 l2
  CHECK(cfg.grid_for(LearnerKind::ert).size() == 4);   // 2 trees x 2 min_leaf
  CHECK(cfg.grid_for(LearnerKind::gbt).size() == 8);   // 2 depth x 2 eta x 2 rounds
  CHECK(cfg.select_learners() ==
        std::vector<LearnerKind>{LearnerKind::lr, LearnerKind::ert, LearnerKind::gbt});
}

TEST_CASE("grid overrides expand as a cross product in documented order") {
  PipelineConfig cfg;
  cfg.set("grid.gbt.max_depth", "2,3");
  cfg.set("grid.gbt.learning_rate", "0.3");
  cfg.set("grid.gbt.rounds", "10,20,30");
  auto grid = cfg.grid_for(LearnerKind::gbt);
  REQUIRE(grid.size() == 6);
  CHECK(grid[0].gbt.max_depth == 2);
  CHECK(grid[0].gbt.rounds == 10);
  CHECK(grid[1].gbt.rounds == 20);  // rounds varies fastest (expanded last)
  CHECK(grid[3].gbt.max_depth == 3);
  for (const auto& c : grid) CHECK(c.gbt.learning_rate == 0.3);
}
