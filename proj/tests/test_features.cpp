#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "vandet/features.hpp"
#include "vandet/prng.hpp"

using namespace vandet;
using test_support::make_record;

namespace {

FeatureSchema mixed_schema() {
  return parse_schema_lines(
      {"amount\tnum", "userName\tcat", "revisionTs\tdrop", "edits\tnum"}, "test");
}

std::vector<RevisionRecord> labeled_rows() {
  std::vector<RevisionRecord> rows;
  auto add = [&](std::string id, Value amount, Value user, Value edits, bool label) {
    rows.push_back(make_record(std::move(id), "b1",
                               {amount, user, Value::category("t"), edits}, label));
  };
  add("r0", Value::number(1), Value::category("alice"), Value::number(10), false);
  add("r1", Value::number(2), Value::category("alice"), Value::number(20), false);
  add("r2", Value::number(3), Value::category("bob"), Value::number(30), true);
  add("r3", Value::missing(), Value::category("bob"), Value::number(40), true);
  return rows;
}

}  // namespace

TEST_CASE("missingness fractions count training rows only") {
  FeatureSchema schema = parse_schema_lines({"x\tnum"}, "test");
  std::vector<RevisionRecord> rows;
  for (int i = 0; i < 10; ++i)
    rows.push_back(make_record("r" + std::to_string(i), "b",
                               {i < 3 ? Value::missing() : Value::number(i)}, false));
  auto report = compute_missingness(rows, schema);
  CHECK(report.fraction.at("x") == doctest::Approx(0.3).epsilon(1e-12));

  for (auto& rec : rows) rec.values[0] = Value::number(1);
  CHECK(compute_missingness(rows, schema).fraction.at("x") == 0.0);
  for (auto& rec : rows) rec.values[0] = Value::missing();
  CHECK(compute_missingness(rows, schema).fraction.at("x") == 1.0);

  bool caught = false;
  try {
    compute_missingness({}, schema);
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::EmptyTrainingSet);
  }
  CHECK(caught);
}

TEST_CASE("select_features: strictly-greater threshold, dropped always excluded") {
  FeatureSchema schema = mixed_schema();
  MissingnessReport report;
  report.fraction = {{"amount", 0.25}, {"userName", 0.26}, {"edits", 0.0}};
  FeatureSchema retained = select_features(report, 0.25, schema);
  REQUIRE(retained.size() == 2);
  CHECK(retained.decls[0].name == "amount");  // exactly 25% stays
  CHECK(retained.decls[1].name == "edits");
  // original source positions survive selection
  CHECK(retained.decls[1].source_index == 3);

  report.fraction = {{"amount", 0.5}, {"userName", 0.9}, {"edits", 0.3}};
  bool caught = false;
  try {
    select_features(report, 0.25, schema);
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::NoFeaturesRetained);
  }
  CHECK(caught);
}

TEST_CASE("median fitting: odd, even, missing-skipped") {
  FeatureSchema schema = parse_schema_lines({"x\tnum"}, "test");
  auto rows_of = [&](std::vector<Value> vals) {
    std::vector<RevisionRecord> rows;
    for (std::size_t i = 0; i < vals.size(); ++i)
      rows.push_back(make_record("r" + std::to_string(i), "b", {vals[i]}, false));
    return rows;
  };
  CHECK(fit_medians(rows_of({Value::number(1), Value::number(2), Value::number(3)}), schema)
            .medians.at("x") == 2.0);
  CHECK(fit_medians(rows_of({Value::number(1), Value::number(2), Value::number(3),
                             Value::number(4)}),
                    schema)
            .medians.at("x") == 2.5);
  CHECK(fit_medians(rows_of({Value::number(5), Value::missing(), Value::number(7)}), schema)
            .medians.at("x") == 6.0);

  bool caught = false;
  try {
    fit_medians(rows_of({Value::missing(), Value::missing()}), schema);
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::AllMissingFeature);
  }
  CHECK(caught);
}

TEST_CASE("spam stats: counts, global rate, smoothing") {
  FeatureSchema schema = parse_schema_lines({"user\tcat"}, "test");
  std::vector<RevisionRecord> rows;
  // value seen 20 times with 17 positives -> raw ratio 0.85, count 17
  for (int i = 0; i < 20; ++i)
    rows.push_back(make_record("a" + std::to_string(i), "b", {Value::category("User1")}, i < 17));
  // a clean user for contrast
  for (int i = 0; i < 5; ++i)
    rows.push_back(make_record("c" + std::to_string(i), "b", {Value::category("User2")}, false));
  SpamStatsTable table = fit_spam_stats(rows, schema.decls[0]);
  CHECK(table.values.at("User1").n == 20);
  CHECK(table.values.at("User1").s == 17);
  CHECK(table.global_rate == doctest::Approx(17.0 / 25.0).epsilon(1e-12));
  // alpha = 0 recovers the raw spam ratio; the encoded pair is (ratio, count)
  CHECK(smoothed_spam_probability(17, 20, table.global_rate, 0.0) == doctest::Approx(0.85));

  // spec fixtures
  CHECK(smoothed_spam_probability(1, 4, 0.25, 0.0) == doctest::Approx(0.25));
  CHECK(smoothed_spam_probability(1, 1, 0.1, 1.0) == doctest::Approx(0.55));

  // unlabeled row refuses to fit
  rows.push_back(make_record("u", "b", {Value::category("User3")}));
  bool caught = false;
  try {
    fit_spam_stats(rows, schema.decls[0]);
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::UnlabeledRow);
  }
  CHECK(caught);
}

TEST_CASE("smoothing is monotone toward the global rate") {
  const double g = 0.3;
  double prev = smoothed_spam_probability(9, 10, g, 0.0);
  CHECK(prev == doctest::Approx(0.9));
  for (double alpha : {0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4}) {
    double p = smoothed_spam_probability(9, 10, g, alpha);
    CHECK(p < prev);  // ratio above g: decreasing toward g
    CHECK(p > g);
    prev = p;
  }
  CHECK(smoothed_spam_probability(0, 0, g, 10.0) == g);
  CHECK(smoothed_spam_probability(0, 0, g, 0.0) == g);
}

TEST_CASE("transform builds the documented column layout") {
  FeatureSchema schema = mixed_schema();
  auto rows = labeled_rows();
  FeatureConfig cfg;
  cfg.smoothing_alpha = 0.0;  // raw ratios for hand-checking
  FeaturePipeline pipeline = fit_feature_pipeline(rows, schema, cfg);
  DesignMatrix m = transform(rows, pipeline);

  // 2 numeric + 1 categorical -> 4 columns (dropped column gone)
  REQUIRE(m.cols == 4);
  CHECK(m.column_names == std::vector<std::string>{"amount", "userName:spam_prob",
                                                   "userName:spam_count", "edits"});
  // r3's missing amount imputed with median of {1,2,3} = 2
  CHECK(m.at(3, 0) == 2.0);
  // alice: 2 occurrences, 0 spam -> (0, 0); bob: 2 occurrences, 2 spam -> (1, 2)
  CHECK(m.at(0, 1) == 0.0);
  CHECK(m.at(2, 1) == 1.0);
  CHECK(m.at(2, 2) == 2.0);
  CHECK(m.labels == std::vector<double>{0, 0, 1, 1});
  CHECK(m.row_ids[3] == "r3");
}

TEST_CASE("leakage illustration: a unique training value encodes its own label") {
  FeatureSchema schema = parse_schema_lines({"user\tcat"}, "test");
  std::vector<RevisionRecord> rows{
      make_record("r0", "b", {Value::category("only")}, true),
      make_record("r1", "b", {Value::category("other")}, false),
  };
  FeatureConfig cfg;
  cfg.smoothing_alpha = 0.0;
  FeaturePipeline pipeline = fit_feature_pipeline(rows, schema, cfg);
  DesignMatrix m = transform(rows, pipeline);
  CHECK(m.at(0, 0) == 1.0);  // n=1, s=1, alpha=0
}

TEST_CASE("unseen and missing categorical values encode as (g, 0)") {
  FeatureSchema schema = parse_schema_lines({"user\tcat"}, "test");
  std::vector<RevisionRecord> train;
  for (int i = 0; i < 50; ++i)
    train.push_back(
        make_record("r" + std::to_string(i), "b", {Value::category("seen")}, i < 19 ? true : false));
  FeatureConfig cfg;
  FeaturePipeline pipeline = fit_feature_pipeline(train, schema, cfg);
  const double g = pipeline.spam_tables.at("user").global_rate;
  CHECK(g == doctest::Approx(0.38));

  std::vector<RevisionRecord> fresh{
      make_record("x0", "b", {Value::category("never-seen")}),
      make_record("x1", "b", {Value::missing()}),
  };
  DesignMatrix m = transform(fresh, pipeline);
  CHECK(m.at(0, 0) == g);
  CHECK(m.at(0, 1) == 0.0);
  CHECK(m.at(1, 0) == g);
  CHECK(m.at(1, 1) == 0.0);
}

TEST_CASE("fit/transform separation: transforming twice is identical") {
  FeatureSchema schema = mixed_schema();
  auto rows = labeled_rows();
  FeaturePipeline pipeline = fit_feature_pipeline(rows, schema, FeatureConfig{});
  DesignMatrix a = transform(rows, pipeline);
  DesignMatrix b = transform(rows, pipeline);
  CHECK(a.data == b.data);
  CHECK(a.column_names == b.column_names);
}

TEST_CASE("totality: arbitrary missingness and unseen values never yield non-finite cells") {
  Pcg32 rng(31337);
  for (int trial = 0; trial < 40; ++trial) {
    int n_num = 1 + static_cast<int>(rng.bounded(4));
    int n_cat = static_cast<int>(rng.bounded(3));
    std::vector<std::string> lines;
    for (int f = 0; f < n_num; ++f) lines.push_back("num" + std::to_string(f) + "\tnum");
    for (int f = 0; f < n_cat; ++f) lines.push_back("cat" + std::to_string(f) + "\tcat");
    FeatureSchema schema = parse_schema_lines(lines, "test");

    auto random_rows = [&](int n, bool unseen_pool) {
      std::vector<RevisionRecord> rows;
      for (int i = 0; i < n; ++i) {
        std::vector<Value> values;
        for (int f = 0; f < n_num; ++f) {
          if (rng.next_double() < 0.6) values.push_back(Value::missing());
          else values.push_back(Value::number(rng.next_double() * 100 - 50));
        }
        for (int f = 0; f < n_cat; ++f) {
          if (rng.next_double() < 0.6) values.push_back(Value::missing());
          else
            values.push_back(Value::category((unseen_pool ? "v" : "u") +
                                             std::to_string(rng.bounded(20))));
        }
        rows.push_back(make_record((unseen_pool ? "t" : "s") + std::to_string(i), "b",
                                   std::move(values), rng.bounded(2) == 0));
      }
      return rows;
    };

    auto train = random_rows(40, false);
    FeatureConfig cfg;
    cfg.missingness_threshold = 0.95;  // keep features despite heavy missingness
    FeaturePipeline pipeline;
    try {
      pipeline = fit_feature_pipeline(train, schema, cfg);
    } catch (const Error& e) {
      // a fully-missing numeric feature can legitimately be unfittable
      CHECK((e.code() == ErrorCode::AllMissingFeature ||
             e.code() == ErrorCode::NoFeaturesRetained));
      continue;
    }
    std::size_t num_retained = 0, cat_retained = 0;
    for (const auto& d : pipeline.retained.decls)
      (d.kind == FeatureKind::numeric ? num_retained : cat_retained) += 1;
    DesignMatrix m = transform(random_rows(30, true), pipeline);
    CHECK(m.cols == num_retained + 2 * cat_retained);
    for (double v : m.data) CHECK(std::isfinite(v));
  }
}

TEST_CASE("pre-split spam fitting (ablation flag) counts held-out rows") {
  FeatureSchema schema = parse_schema_lines({"user\tcat"}, "test");
  std::vector<RevisionRecord> train{
      make_record("t0", "b", {Value::category("train-user")}, true),
      make_record("t1", "b", {Value::category("train-user")}, false),
  };
  std::vector<RevisionRecord> presplit = train;
  presplit.push_back(make_record("v0", "b", {Value::category("val-only-user")}, true));

  FeaturePipeline plain = fit_feature_pipeline(train, schema, FeatureConfig{});
  CHECK(plain.spam_tables.at("user").values.count("val-only-user") == 0);

  FeatureConfig ablation;
  ablation.spam_fit_on_presplit = true;
  FeaturePipeline leaky = fit_feature_pipeline(train, schema, ablation, &presplit);
  CHECK(leaky.spam_tables.at("user").values.count("val-only-user") == 1);
  // medians/missingness stay train-only either way
  CHECK(leaky.missingness.fitted_on == 2);
}

TEST_CASE("excluding then transforming equals transforming then deleting columns") {
  FeatureSchema schema = parse_schema_lines({"keep\tnum", "leaky\tnum", "user\tcat"}, "test");
  std::vector<RevisionRecord> rows;
  Pcg32 rng(5);
  for (int i = 0; i < 30; ++i) {
    std::vector<Value> values;
    values.push_back(Value::number(rng.next_double()));
    // `leaky` is missing 40% of the time -> excluded at threshold 0.25
    values.push_back(rng.next_double() < 0.4 ? Value::missing()
                                             : Value::number(rng.next_double()));
    values.push_back(Value::category("u" + std::to_string(rng.bounded(4))));
    rows.push_back(make_record("r" + std::to_string(i), "b", std::move(values),
                               rng.bounded(2) == 0));
  }
  FeatureConfig strict;  // threshold 0.25 drops `leaky`
  FeaturePipeline p_strict = fit_feature_pipeline(rows, schema, strict);
  REQUIRE(p_strict.retained.size() == 2);

  FeatureConfig lax;
  lax.missingness_threshold = 1.0;  // keeps `leaky`
  FeaturePipeline p_lax = fit_feature_pipeline(rows, schema, lax);
  REQUIRE(p_lax.retained.size() == 3);

  DesignMatrix strict_m = transform(rows, p_strict);
  DesignMatrix lax_m = transform(rows, p_lax);
  // deleting `leaky`'s column from the lax matrix reproduces the strict one
  std::size_t leaky_col = 1;
  for (std::size_t r = 0; r < lax_m.rows; ++r) {
    std::size_t sc = 0;
    for (std::size_t c = 0; c < lax_m.cols; ++c) {
      if (c == leaky_col) continue;
      CHECK(strict_m.at(r, sc++) == lax_m.at(r, c));
    }
  }
}
