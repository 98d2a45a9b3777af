#include <doctest.h>

#include <string>
#include <vector>

#include "test_support.hpp"
#include "vandet/ingest.hpp"
#include "vandet/prng.hpp"

using namespace vandet;
using test_support::TempDir;

namespace {

FeatureSchema three_col_schema() {
  return parse_schema_lines({"commentLength\tnum", "userName\tcat", "revisionId\tdrop"}, "test");
}

#define CHECK_RAISES(code_expected, expr)            \
  do {                                               \
    bool caught = false;                             \
    try {                                            \
      (void)(expr);                                  \
    } catch (const Error& e) {                       \
      caught = true;                                 \
      CHECK(e.code() == (code_expected));            \
    }                                                \
    CHECK(caught);                                   \
  } while (0)

}  // namespace

TEST_CASE("load_schema parses declarations in order") {
  FeatureSchema s = three_col_schema();
  REQUIRE(s.size() == 3);
  CHECK(s.decls[0].name == "commentLength");
  CHECK(s.decls[0].kind == FeatureKind::numeric);
  CHECK(s.decls[1].kind == FeatureKind::categorical);
  CHECK(s.decls[2].kind == FeatureKind::dropped);
  CHECK(s.decls[1].source_index == 1);
}

TEST_CASE("load_schema rejects duplicates, unknown kinds, empty files") {
  CHECK_RAISES(ErrorCode::DuplicateFeature,
               parse_schema_lines({"userName\tcat", "userName\tcat"}, "test"));
  CHECK_RAISES(ErrorCode::UnknownKind, parse_schema_lines({"x\tinteger"}, "test"));
  CHECK_RAISES(ErrorCode::EmptySchema, parse_schema_lines({}, "test"));
  CHECK_RAISES(ErrorCode::EmptySchema, parse_schema_lines({"# only a comment"}, "test"));
}

TEST_CASE("parse_revision_row splits typed cells") {
  FeatureSchema s = three_col_schema();
  RevisionRecord rec = parse_revision_row("r1\t42.0\tUser1\tx9", s, "b1");
  CHECK(rec.revision_id == "r1");
  CHECK(rec.batch_id == "b1");
  REQUIRE(rec.values.size() == 3);
  CHECK(rec.values[0] == Value::number(42.0));
  CHECK(rec.values[1] == Value::category("User1"));
  CHECK(rec.values[2] == Value::category("x9"));  // dropped: kept positionally
  CHECK(!rec.label.has_value());
}

TEST_CASE("NA and empty tokens parse to missing") {
  FeatureSchema s = three_col_schema();
  RevisionRecord rec = parse_revision_row("r2\tNA\tNA\tx9", s, "b1");
  CHECK(rec.values[0].is_missing());
  CHECK(rec.values[1].is_missing());
  RevisionRecord rec2 = parse_revision_row("r2\t\t\tx9", s, "b1");
  CHECK(rec2.values[0].is_missing());
  CHECK(rec2.values[1].is_missing());
}

TEST_CASE("row parse errors") {
  FeatureSchema s = three_col_schema();
  CHECK_RAISES(ErrorCode::ColumnCountMismatch, parse_revision_row("r3\t1.0", s, "b1"));
  CHECK_RAISES(ErrorCode::UnparsableNumeric, parse_revision_row("r\tabc\tu\tx", s, "b1"));
  CHECK_RAISES(ErrorCode::NonFiniteNumeric, parse_revision_row("r\tinf\tu\tx", s, "b1"));
  CHECK_RAISES(ErrorCode::NonFiniteNumeric, parse_revision_row("r\tnan\tu\tx", s, "b1"));
  CHECK_RAISES(ErrorCode::NonFiniteNumeric, parse_revision_row("r\t1e999\tu\tx", s, "b1"));
  CHECK_RAISES(ErrorCode::EmptyRevisionId, parse_revision_row("\t1.0\tu\tx", s, "b1"));
}

TEST_CASE("record round-trips through the row format") {
  FeatureSchema s = three_col_schema();
  Pcg32 rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    RevisionRecord rec;
    rec.revision_id = "r" + std::to_string(trial);
    rec.batch_id = "b1";
    // numeric slot: random double at awkward precision, or missing
    if (rng.bounded(4) == 0) rec.values.push_back(Value::missing());
    else
      rec.values.push_back(Value::number((rng.next_double() - 0.5) * 1e9 /
                                         (1.0 + rng.next_double() * 1e3)));
    if (rng.bounded(4) == 0) rec.values.push_back(Value::missing());
    else rec.values.push_back(Value::category("user" + std::to_string(rng.bounded(50))));
    rec.values.push_back(Value::category("tok" + std::to_string(rng.bounded(50))));
    RevisionRecord back = parse_revision_row(format_revision_row(rec), s, "b1");
    CHECK(back == rec);
  }
}

TEST_CASE("join_labels sets labels and counts unlabeled") {
  TempDir dir("truth");
  std::string truth_path = dir.write_file("truth.tsv", "r1\ttrue\n");
  TruthMap truth = load_truth(truth_path);
  LabelJoiner joiner(truth);
  FeatureSchema s = three_col_schema();
  RevisionRecord r1 = parse_revision_row("r1\t1\tu\tx", s, "b1");
  RevisionRecord r2 = parse_revision_row("r2\t1\tu\tx", s, "b1");
  joiner.apply(r1);
  joiner.apply(r2);
  CHECK(r1.label == std::optional<bool>(true));
  CHECK(!r2.label.has_value());
  CHECK(joiner.unlabeled == 1);

  // idempotent: joining the same truth twice leaves labels unchanged
  LabelJoiner again(truth);
  RevisionRecord r1b = r1;
  again.apply(r1b);
  again.apply(r1b);
  CHECK(r1b == r1);
}

TEST_CASE("truth file edge cases") {
  TempDir dir("truth2");
  CHECK_RAISES(ErrorCode::DuplicateTruthEntry,
               load_truth(dir.write_file("conflict.tsv", "r1\ttrue\nr1\tfalse\n")));
  // duplicate with the same label is benign
  TruthMap t = load_truth(dir.write_file("dup.tsv", "r1\ttrue\nr1\ttrue\n"));
  CHECK(t.size() == 1);
  CHECK_RAISES(ErrorCode::MalformedTruthLine,
               load_truth(dir.write_file("bad.tsv", "r1\tyes\n")));
  CHECK_RAISES(ErrorCode::MalformedTruthLine,
               load_truth(dir.write_file("short.tsv", "r1\n")));
  TruthMap empty = load_truth(dir.write_file("empty.tsv", ""));
  CHECK(empty.empty());
}

TEST_CASE("scan_batches streams in manifest order with counts") {
  TempDir dir("scan");
  std::string schema_path = dir.write_file("schema.tsv", "x\tnum\n");
  FeatureSchema s = load_schema(schema_path);
  std::string b1 = dir.write_file("b1.tsv", "r1\t1\nr2\t2\nr3\t3\n");
  std::string b2 = dir.write_file("b2.tsv", "r4\t4\nr5\t5\nr6\t6\nr7\t7\nr8\t8\n");
  std::vector<RevisionRecord> seen;
  ScanStats stats;
  BatchManifest manifest = scan_batches({b1, b2}, s, ScanOptions{}, [&](RevisionRecord&& rec) {
    seen.push_back(std::move(rec));
  }, &stats);
  REQUIRE(manifest.batches.size() == 2);
  CHECK(manifest.batches[0].batch_id == "b1");
  CHECK(manifest.batches[0].row_count == 3);
  CHECK(manifest.batches[1].row_count == 5);
  CHECK(seen.size() == 8);
  CHECK(seen.front().revision_id == "r1");
  CHECK(seen.back().revision_id == "r8");
  CHECK(stats.rows == 8);
  CHECK(stats.peak_in_flight == 1);  // streaming bound: one resident record
}

TEST_CASE("scan_batches error policies") {
  TempDir dir("scanerr");
  FeatureSchema s = parse_schema_lines({"x\tnum"}, "test");
  std::string bad = dir.write_file("bad.tsv", "r1\t1\nr2\toops\nr3\t3\n");

  std::vector<RevisionRecord> seen;
  ScanStats stats;
  ScanOptions skip{false, RowErrorPolicy::skip_and_count};
  scan_batches({bad}, s, skip, [&](RevisionRecord&& rec) { seen.push_back(std::move(rec)); },
               &stats);
  CHECK(seen.size() == 2);
  CHECK(stats.skipped == 1);

  bool caught = false;
  try {
    scan_batches({bad}, s, ScanOptions{}, [](RevisionRecord&&) {});
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::UnparsableNumeric);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("bad") != std::string::npos);  // batch id context
  }
  CHECK(caught);
}

TEST_CASE("manifest preserves order for 21 batches") {
  TempDir dir("scan21");
  FeatureSchema s = parse_schema_lines({"x\tnum"}, "test");
  std::vector<std::string> paths;
  for (int i = 0; i < 21; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "batch%02d.tsv", i);
    paths.push_back(dir.write_file(name, "r" + std::to_string(i) + "\t1\n"));
  }
  BatchManifest manifest = scan_batches(paths, s, ScanOptions{}, [](RevisionRecord&&) {});
  REQUIRE(manifest.batches.size() == 21);
  for (int i = 0; i < 21; ++i) {
    char expect[32];
    std::snprintf(expect, sizeof(expect), "batch%02d", i);
    CHECK(manifest.batches[static_cast<std::size_t>(i)].batch_id == expect);
  }
}

TEST_CASE("two batch files with the same stem are rejected") {
  TempDir dir("dupbatch");
  FeatureSchema s = parse_schema_lines({"x\tnum"}, "test");
  std::filesystem::create_directories(dir.path() / "a");
  std::filesystem::create_directories(dir.path() / "b");
  std::string p1 = dir.write_file("a/part.tsv", "r1\t1\n");
  std::string p2 = dir.write_file("b/part.tsv", "r2\t2\n");
  bool caught = false;
  try {
    scan_batches({p1, p2}, s, ScanOptions{}, [](RevisionRecord&&) {});
  } catch (const Error& e) {
    caught = true;
    CHECK(e.code() == ErrorCode::DuplicateBatchId);
  }
  CHECK(caught);
}

TEST_CASE("header line is skipped when declared") {
  TempDir dir("scanhdr");
  FeatureSchema s = parse_schema_lines({"x\tnum"}, "test");
  std::string path = dir.write_file("h.tsv", "revision_id\tx\nr1\t1\n");
  std::vector<RevisionRecord> seen;
  ScanOptions opts;
  opts.has_header = true;
  scan_batches({path}, s, opts, [&](RevisionRecord&& rec) { seen.push_back(std::move(rec)); });
  REQUIRE(seen.size() == 1);
  CHECK(seen[0].revision_id == "r1");
}
