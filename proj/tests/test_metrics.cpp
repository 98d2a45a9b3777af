#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vandet/metrics.hpp"
#include "vandet/prng.hpp"

using namespace vandet;

namespace {

// random instance with deliberate ties (scores drawn off a small lattice)
struct Instance {
  std::vector<double> scores;
  std::vector<double> labels;
};

Instance random_instance(Pcg32& rng, std::size_t max_n = 200) {
  Instance inst;
  std::size_t n = 2 + rng.bounded(max_n - 1);
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    double score = rng.bounded(2) == 0
                       ? static_cast<double>(rng.bounded(12)) / 11.0  // lattice -> ties
                       : rng.next_double();
    double label = rng.bounded(3) == 0 ? 1.0 : 0.0;
    inst.scores.push_back(score);
    inst.labels.push_back(label);
    (label > 0.5 ? has_pos : has_neg) = true;
  }
  if (!has_pos) inst.labels[0] = 1.0;
  if (!has_neg) inst.labels[1] = 0.0;
  return inst;
}

const std::vector<double> kScores{0.9, 0.8, 0.7, 0.3};
const std::vector<double> kLabels{1, 0, 1, 0};

}  // namespace

TEST_CASE("roc_auc hand fixture: 0.75") {
  CHECK(roc_auc(kScores, kLabels) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(oracles::roc_auc_pairwise(kScores, kLabels) == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("roc_auc extremes") {
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
  CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == 0.5);
  bool caught = false;
  try {
    roc_auc({0.1, 0.2}, {1, 1});
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::SingleClassInput);
  }
  CHECK(caught);
}

TEST_CASE("roc_curve hand fixture") {
  CurvePoints curve = roc_curve(kScores, kLabels);
  std::vector<std::pair<double, double>> expected{
      {0, 0}, {0, 0.5}, {0.5, 0.5}, {0.5, 1}, {1, 1}};
  CHECK(curve.points == expected);
}

TEST_CASE("roc_curve degenerate shapes") {
  CurvePoints perfect = roc_curve({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0});
  bool passes_corner = false;
  for (auto [x, y] : perfect.points)
    if (x == 0.0 && y == 1.0) passes_corner = true;
  CHECK(passes_corner);

  CurvePoints flat = roc_curve({0.4, 0.4, 0.4}, {1, 0, 1});
  std::vector<std::pair<double, double>> expected{{0, 0}, {1, 1}};
  CHECK(flat.points == expected);
}

TEST_CASE("pr_auc hand fixtures") {
  // ranking (+,-,+,-): (1/1 + 2/3)/2 = 5/6
  CHECK(pr_auc(kScores, kLabels) == doctest::Approx(5.0 / 6.0).epsilon(1e-13));
  CHECK(pr_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
  // single positive ranked last among 4
  CHECK(pr_auc({0.9, 0.8, 0.7, 0.1}, {0, 0, 0, 1}) == doctest::Approx(0.25).epsilon(1e-13));
  bool caught = false;
  try {
    pr_auc({0.1, 0.2}, {0, 0});
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::NoPositives);
  }
  CHECK(caught);
}

TEST_CASE("oracle equivalence on random tied instances") {
  Pcg32 rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = random_instance(rng);
    CHECK(roc_auc(inst.scores, inst.labels) ==
          doctest::Approx(oracles::roc_auc_pairwise(inst.scores, inst.labels)).epsilon(1e-12));
    CHECK(pr_auc(inst.scores, inst.labels) ==
          doctest::Approx(oracles::average_precision_rescan(inst.scores, inst.labels))
              .epsilon(1e-12));
  }
}

TEST_CASE("roc_auc is invariant under strictly increasing transforms") {
  Pcg32 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(rng, 80);
    double base = roc_auc(inst.scores, inst.labels);
    std::vector<double> affine, cubic;
    for (double s : inst.scores) {
      affine.push_back(2.0 * s + 1.0);
      cubic.push_back(s * s * s);
    }
    CHECK(roc_auc(affine, inst.labels) == doctest::Approx(base).epsilon(1e-12));
    CHECK(roc_auc(cubic, inst.labels) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("trapezoid area under roc_curve equals roc_auc") {
  Pcg32 rng(90);
  for (int trial = 0; trial < 100; ++trial) {
    Instance inst = random_instance(rng);
    CHECK(trapezoid_area(roc_curve(inst.scores, inst.labels)) ==
          doctest::Approx(roc_auc(inst.scores, inst.labels)).epsilon(1e-12));
  }
}

TEST_CASE("complement symmetry without ties") {
  Pcg32 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 5 + rng.bounded(60);
    std::vector<double> scores, labels;
    for (std::size_t i = 0; i < n; ++i) {
      scores.push_back(static_cast<double>(i) + rng.next_double() * 0.5);  // distinct
      labels.push_back(rng.bounded(2) ? 1.0 : 0.0);
    }
    labels[0] = 1.0;
    labels[1] = 0.0;
    std::vector<double> negated;
    for (double s : scores) negated.push_back(-s);
    CHECK(roc_auc(negated, labels) ==
          doctest::Approx(1.0 - roc_auc(scores, labels)).epsilon(1e-12));
  }
}

TEST_CASE("pr_curve: non-decreasing recall and step integral equals average precision") {
  Pcg32 rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(rng);
    CurvePoints curve = pr_curve(inst.scores, inst.labels);
    double prev_recall = 0.0, integral = 0.0;
    for (auto [recall, precision] : curve.points) {
      CHECK(recall >= prev_recall);
      integral += (recall - prev_recall) * precision;
      prev_recall = recall;
    }
    CHECK(integral == doctest::Approx(pr_auc(inst.scores, inst.labels)).epsilon(1e-12));
  }
}

TEST_CASE("tied ranks break by row id in average precision") {
  std::vector<double> scores{0.5, 0.5};
  std::vector<double> labels{0, 1};
  std::vector<std::string> ids_pos_first{"b", "a"};  // positive row id sorts first
  std::vector<std::string> ids_pos_last{"a", "b"};
  CHECK(pr_auc(scores, labels, &ids_pos_first) == doctest::Approx(1.0));
  CHECK(pr_auc(scores, labels, &ids_pos_last) == doctest::Approx(0.5));
}

TEST_CASE("confusion metrics hand fixture") {
  MetricsRow row = confusion_metrics(kScores, kLabels, 0.5);
  CHECK(row.accuracy == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(row.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(row.recall == 1.0);
  CHECK(row.f1 == doctest::Approx(0.8).epsilon(1e-13));
}

TEST_CASE("confusion metrics degenerate thresholds") {
  MetricsRow none = confusion_metrics(kScores, kLabels, 1.1);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK(none.accuracy == 0.5);  // the two negatives are correct

  MetricsRow all = confusion_metrics({0.2, 0.9}, {1, 1}, 0.0);
  CHECK(all.accuracy == 1.0);
  CHECK(all.precision == 1.0);
  CHECK(all.recall == 1.0);
  CHECK(all.f1 == 1.0);
}

TEST_CASE("evaluate_models ranks by ROC-AUC and keeps aligned curves") {
  std::vector<double> labels{1, 0, 1, 0, 0};
  std::vector<std::string> ids{"a", "b", "c", "d", "e"};
  ModelScores good{"good", {0.9, 0.2, 0.8, 0.3, 0.1}};
  ModelScores constant{"flat", {0.5, 0.5, 0.5, 0.5, 0.5}};
  EvaluationReport report = evaluate_models({constant, good}, labels, ids);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].roc_auc == 0.5);
  CHECK(report.rows[1].roc_auc == 1.0);
  CHECK(report.selected == 1);
  CHECK(report.roc_curves.size() == 2);
  CHECK(report.pr_curves.size() == 2);

  // identical score vectors produce identical rows
  EvaluationReport twin = evaluate_models({good, good}, labels, ids);
  CHECK(twin.rows[0].roc_auc == twin.rows[1].roc_auc);
  CHECK(twin.rows[0].pr_auc == twin.rows[1].pr_auc);
  CHECK(twin.rows[0].f1 == twin.rows[1].f1);
  CHECK(twin.selected == 0);  // first wins ties

  bool caught = false;
  try {
    evaluate_models({ModelScores{"short", {0.1}}}, labels, ids);
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::MisalignedScores);
  }
  CHECK(caught);
}
