#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/text.hpp"

namespace vandet {

enum class FeatureKind { numeric, categorical, dropped };

inline const char* feature_kind_token(FeatureKind k) {
  switch (k) {
    case FeatureKind::numeric: return "num";
    case FeatureKind::categorical: return "cat";
    case FeatureKind::dropped: return "drop";
  }
  return "?";
}

struct FeatureDecl {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::size_t source_index = 0;  // 0-based position among the feature columns

  bool operator==(const FeatureDecl&) const = default;
};

struct FeatureSchema {
  std::vector<FeatureDecl> decls;

  std::size_t size() const { return decls.size(); }
  bool operator==(const FeatureSchema&) const = default;
};

// One cell of a revision row. `NA` and the empty token both parse to missing;
// dropped columns keep their raw token so rows round-trip unchanged.
struct Value {
  enum class Kind { missing, numeric, categorical };

  Kind kind = Kind::missing;
  double num = 0.0;
  std::string cat;

  static Value missing() { return Value{}; }
  static Value number(double v) { return Value{Kind::numeric, v, {}}; }
  static Value category(std::string v) { return Value{Kind::categorical, 0.0, std::move(v)}; }

  bool is_missing() const { return kind == Kind::missing; }

  bool operator==(const Value& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case Kind::missing: return true;
      case Kind::numeric: return num == o.num;
      case Kind::categorical: return cat == o.cat;
    }
    return false;
  }
};

struct RevisionRecord {
  std::string revision_id;
  std::string batch_id;
  std::vector<Value> values;  // aligned to schema order
  std::optional<bool> label;  // true = vandalism

  bool operator==(const RevisionRecord&) const = default;
};

struct BatchEntry {
  std::string batch_id;
  std::string path;
  std::uint64_t row_count = 0;
};

struct BatchManifest {
  std::vector<BatchEntry> batches;  // manifest order = emission order
};

inline const std::string kMissingToken = "NA";

// --- schema ------------------------------------------------------------

inline FeatureSchema parse_schema_lines(const std::vector<std::string>& lines,
                                        const std::string& origin) {
  FeatureSchema schema;
  std::unordered_set<std::string> seen;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view raw = lines[ln];
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 2)
      raise(ErrorCode::UnknownKind,
            origin + ":" + std::to_string(ln + 1) + ": expected `name<TAB>kind`");
    std::string name(trim(cols[0]));
    std::string kind_token(trim(cols[1]));
    if (name.empty())
      raise(ErrorCode::UnknownKind, origin + ":" + std::to_string(ln + 1) + ": empty feature name");
    if (!seen.insert(name).second)
      raise(ErrorCode::DuplicateFeature,
            origin + ":" + std::to_string(ln + 1) + ": duplicate feature `" + name + "`");
    FeatureKind kind;
    if (kind_token == "num") kind = FeatureKind::numeric;
    else if (kind_token == "cat") kind = FeatureKind::categorical;
    else if (kind_token == "drop") kind = FeatureKind::dropped;
    else
      raise(ErrorCode::UnknownKind,
            origin + ":" + std::to_string(ln + 1) + ": unknown kind `" + kind_token + "`");
    schema.decls.push_back(FeatureDecl{std::move(name), kind, schema.decls.size()});
  }
  if (schema.decls.empty()) raise(ErrorCode::EmptySchema, origin + ": no feature declarations");
  return schema;
}

inline FeatureSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::MissingInput, "cannot open schema file " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return parse_schema_lines(lines, path);
}

// --- rows --------------------------------------------------------------

inline Value parse_cell(std::string_view token, const FeatureDecl& decl,
                        const std::string& context) {
  if (token == kMissingToken || token.empty()) return Value::missing();
  switch (decl.kind) {
    case FeatureKind::numeric: {
      auto v = parse_double(token);
      if (!v)
        raise(ErrorCode::UnparsableNumeric,
              context + ": feature `" + decl.name + "`: cannot parse `" + std::string(token) + "`");
      if (!std::isfinite(*v))
        raise(ErrorCode::NonFiniteNumeric,
              context + ": feature `" + decl.name + "`: non-finite value `" + std::string(token) + "`");
      return Value::number(*v);
    }
    case FeatureKind::categorical:
    case FeatureKind::dropped:
      return Value::category(std::string(token));
  }
  return Value::missing();
}

// First column is the revision id; the rest align with the schema.
inline RevisionRecord parse_revision_row(std::string_view line, const FeatureSchema& schema,
                                         std::string batch_id,
                                         const std::string& context = "row") {
  auto cols = split_tabs(line);
  if (cols.size() != schema.size() + 1)
    raise(ErrorCode::ColumnCountMismatch,
          context + ": expected " + std::to_string(schema.size() + 1) + " columns, got " +
              std::to_string(cols.size()));
  RevisionRecord rec;
  rec.revision_id = std::string(cols[0]);
  if (rec.revision_id.empty()) raise(ErrorCode::EmptyRevisionId, context + ": empty revision id");
  rec.batch_id = std::move(batch_id);
  rec.values.reserve(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i)
    rec.values.push_back(parse_cell(cols[i + 1], schema.decls[i], context));
  return rec;
}

inline std::string format_cell(const Value& v) {
  switch (v.kind) {
    case Value::Kind::missing: return kMissingToken;
    case Value::Kind::numeric: return format_double(v.num);
    case Value::Kind::categorical: return v.cat;
  }
  return kMissingToken;
}

// Inverse of parse_revision_row (numbers in shortest round-trip form).
inline std::string format_revision_row(const RevisionRecord& rec) {
  std::string out = rec.revision_id;
  for (const Value& v : rec.values) {
    out += '\t';
    out += format_cell(v);
  }
  return out;
}

// --- truth / labels ----------------------------------------------------

using TruthMap = std::unordered_map<std::string, bool>;

inline TruthMap load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::MissingInput, "cannot open truth file " + path);
  TruthMap truth;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto cols = split_tabs(body);
    if (cols.size() != 2)
      raise(ErrorCode::MalformedTruthLine, path + ":" + std::to_string(ln) + ": expected 2 columns");
    bool value;
    if (cols[1] == "true") value = true;
    else if (cols[1] == "false") value = false;
    else
      raise(ErrorCode::MalformedTruthLine,
            path + ":" + std::to_string(ln) + ": label must be `true` or `false`");
    std::string id(cols[0]);
    if (id.empty())
      raise(ErrorCode::MalformedTruthLine, path + ":" + std::to_string(ln) + ": empty revision id");
    auto [it, inserted] = truth.emplace(std::move(id), value);
    if (!inserted && it->second != value)
      raise(ErrorCode::DuplicateTruthEntry,
            path + ":" + std::to_string(ln) + ": conflicting labels for `" + it->first + "`");
  }
  return truth;
}

// Joins labels in place; records absent from the truth map stay unlabeled and
// are counted. Idempotent for a fixed truth map.
struct LabelJoiner {
  const TruthMap* truth;
  std::uint64_t unlabeled = 0;

  explicit LabelJoiner(const TruthMap& t) : truth(&t) {}

  void apply(RevisionRecord& rec) {
    auto it = truth->find(rec.revision_id);
    if (it == truth->end()) {
      rec.label.reset();
      ++unlabeled;
    } else {
      rec.label = it->second;
    }
  }
};

// --- batch scanning ------------------------------------------------------

enum class RowErrorPolicy { abort, skip_and_count };

struct ScanOptions {
  bool has_header = false;
  RowErrorPolicy policy = RowErrorPolicy::abort;
};

struct ScanStats {
  std::uint64_t rows = 0;
  std::uint64_t skipped = 0;
  std::uint64_t peak_in_flight = 0;  // resident records; streaming keeps this at 1
};

inline std::string batch_id_from_path(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// Streams one batch file through `sink(RevisionRecord&&)`. Memory is bounded
// by a single row; row errors carry (batch, line) context.
template <class Sink>
std::uint64_t scan_batch_file(const std::string& path, const std::string& batch_id,
                              const FeatureSchema& schema, const ScanOptions& opts,
                              Sink&& sink, ScanStats* stats = nullptr) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::MissingInput, "cannot open batch file " + path);
  std::string line;
  std::uint64_t rows = 0;
  std::size_t ln = 0;
  bool skip_header = opts.has_header;
  std::uint64_t in_flight = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_header) {
      skip_header = false;
      continue;
    }
    if (line.empty()) continue;
    if (line.front() == '#') continue;  // provenance / comment lines
    std::string context = "batch " + batch_id + " line " + std::to_string(ln);
    try {
      RevisionRecord rec = parse_revision_row(line, schema, batch_id, context);
      if (stats) {
        ++in_flight;
        if (in_flight > stats->peak_in_flight) stats->peak_in_flight = in_flight;
      }
      sink(std::move(rec));
      if (stats) --in_flight;
      ++rows;
      if (stats) ++stats->rows;
    } catch (const Error&) {
      if (opts.policy == RowErrorPolicy::abort) throw;
      if (stats) ++stats->skipped;
    }
  }
  return rows;
}

// Streams every batch file in order; the returned manifest carries the row
// counts observed in this pass.
template <class Sink>
BatchManifest scan_batches(const std::vector<std::string>& paths, const FeatureSchema& schema,
                           const ScanOptions& opts, Sink&& sink, ScanStats* stats = nullptr) {
  BatchManifest manifest;
  manifest.batches.reserve(paths.size());
  std::unordered_set<std::string> seen_ids;
  for (const std::string& path : paths) {
    BatchEntry entry;
    entry.batch_id = batch_id_from_path(path);
    entry.path = path;
    if (!seen_ids.insert(entry.batch_id).second)
      raise(ErrorCode::DuplicateBatchId, "batch id `" + entry.batch_id + "` appears twice");
    entry.row_count = scan_batch_file(path, entry.batch_id, schema, opts, sink, stats);
    manifest.batches.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace vandet
