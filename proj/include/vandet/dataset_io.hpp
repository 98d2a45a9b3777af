#pragma once

#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/ingest.hpp"
#include "vandet/pipeline.hpp"
#include "vandet/sampling.hpp"
#include "vandet/text.hpp"

namespace vandet {

// Sampled dataset file: provenance header, then
//   revision_id <TAB> batch_id <TAB> label(0|1) <TAB> feature columns...
// with feature columns in raw schema order (dropped columns included) so the
// file can be re-parsed with the same schema.
inline const std::string kSampledMagic = "# vandet sampled";

inline void write_sampled_file(const std::string& path,
                               const std::vector<RevisionRecord>& rows,
                               const FeatureSchema& schema, const Provenance& prov) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::MissingInput, "cannot write " + path);
  out << provenance_line("sampled", prov) << "\n";
  out << "# columns: revision_id\tbatch_id\tlabel";
  for (const FeatureDecl& decl : schema.decls) out << "\t" << decl.name;
  out << "\n";
  for (const RevisionRecord& rec : rows) {
    if (!rec.label)
      raise(ErrorCode::UnlabeledRow, "sampled rows must be labeled: " + rec.revision_id);
    out << rec.revision_id << '\t' << rec.batch_id << '\t' << (*rec.label ? '1' : '0');
    for (const Value& v : rec.values) out << '\t' << format_cell(v);
    out << '\n';
  }
}

inline std::vector<RevisionRecord> read_sampled_file(const std::string& path,
                                                     const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::MissingInput, "cannot open sampled file " + path);
  std::vector<RevisionRecord> rows;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != schema.size() + 3)
      raise(ErrorCode::ColumnCountMismatch,
            path + ":" + std::to_string(ln) + ": expected " + std::to_string(schema.size() + 3) +
                " columns, got " + std::to_string(cols.size()));
    RevisionRecord rec;
    rec.revision_id = std::string(cols[0]);
    if (rec.revision_id.empty())
      raise(ErrorCode::EmptyRevisionId, path + ":" + std::to_string(ln));
    rec.batch_id = std::string(cols[1]);
    if (cols[2] == "1") rec.label = true;
    else if (cols[2] == "0") rec.label = false;
    else
      raise(ErrorCode::MalformedTruthLine,
            path + ":" + std::to_string(ln) + ": label must be 0 or 1");
    std::string context = path + ":" + std::to_string(ln);
    for (std::size_t i = 0; i < schema.size(); ++i)
      rec.values.push_back(parse_cell(cols[i + 3], schema.decls[i], context));
    rows.push_back(std::move(rec));
  }
  return rows;
}

// Split sidecar: row_id <TAB> role <TAB> fold (fold is -1 for validation rows).
inline void write_split_file(const std::string& path, const std::vector<RevisionRecord>& rows,
                             const SplitAssignment& split,
                             const std::unordered_map<std::string, int>& folds,
                             const Provenance& prov) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::MissingInput, "cannot write " + path);
  out << provenance_line("split", prov) << "\n";
  out << "# columns: row_id\trole\tfold\n";
  for (const RevisionRecord& rec : rows) {
    auto role = split.role.at(rec.revision_id);
    int fold = -1;
    if (role == SplitRole::train) fold = folds.at(rec.revision_id);
    out << rec.revision_id << '\t' << (role == SplitRole::train ? "train" : "validation") << '\t'
        << fold << '\n';
  }
}

struct SplitFile {
  std::unordered_map<std::string, SplitRole> role;
  std::unordered_map<std::string, int> fold;  // train rows only
};

inline SplitFile read_split_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::MissingInput, "cannot open split file " + path);
  SplitFile split;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 3)
      raise(ErrorCode::ColumnCountMismatch, path + ":" + std::to_string(ln) + ": expected 3 columns");
    std::string id(cols[0]);
    SplitRole role;
    if (cols[1] == "train") role = SplitRole::train;
    else if (cols[1] == "validation") role = SplitRole::validation;
    else
      raise(ErrorCode::ConfigParse, path + ":" + std::to_string(ln) + ": unknown role");
    auto fold = parse_int(cols[2]);
    if (!fold) raise(ErrorCode::ConfigParse, path + ":" + std::to_string(ln) + ": bad fold");
    split.role[id] = role;
    if (role == SplitRole::train) split.fold[id] = static_cast<int>(*fold);
  }
  return split;
}

// Fixed 6-decimal score file: revision_id <TAB> score.
inline void write_scores_file(const std::string& path, const std::vector<std::string>& ids,
                              const std::vector<double>& scores, const Provenance& prov) {
  if (ids.size() != scores.size())
    raise(ErrorCode::MisalignedScores, "ids/scores length mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::MissingInput, "cannot write " + path);
  out << provenance_line("scores", prov) << "\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    out << ids[i] << '\t' << format_fixed(scores[i], 6) << '\n';
}

}  // namespace vandet
