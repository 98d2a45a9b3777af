#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "vandet/ingest.hpp"
#include "vandet/prng.hpp"
#include "vandet/text.hpp"

namespace vandet {

// Synthetic revision corpus with a deliberately nonlinear label rule, used by
// the end-to-end tests and the bundled generator tool.
//
// Schema (in order):
//   editRatio      num   U(0,1)   ┐ XOR pair: signal fires when exactly one
//   commentScore   num   U(0,1)   ┘ of the two exceeds 0.5
//   sizeDeltaA     num   U(-1,1)  ┐ band pair: signal fires when (|A| < 0.35)
//   sizeDeltaB     num   U(-1,1)  ┘ differs from (B > 0.15)
//   activityIndex  num   bell-shaped, weak linear effect; ~5% missing
//   dwellTime      num   heavy-tailed, negligible effect; ~30% missing, so
//                        the default 25% missingness threshold excludes it
//   userName       cat   ~40 skewed users; each carries a fixed spam
//                        propensity in [0,1]; ~2% missing
//   groupId        cat   6 groups with a fixed effect table
//   revisionTs     drop  fake timestamp, declared dropped
//
// The latent score is
//   z = 1.6*xor + 1.2*band + 3.8*(propensity-0.5) + 1.4*group_effect
//       + 0.4*activityIndex + noise
// and exactly `positives` rows with the highest z are labeled vandalism, so
// class counts are exact by construction. Both interaction terms have zero
// marginal effects, which is what separates the tree learners from the
// linear one on this corpus.
struct SyntheticSpec {
  std::size_t positives = 1000;
  std::size_t negatives = 4000;
  int batches = 3;
  std::uint64_t seed = 1;
  double noise = 0.2;
};

struct SyntheticCorpus {
  std::vector<std::string> schema_lines;
  std::vector<RevisionRecord> rows;  // labels set; batch ids assigned
};

inline double synthetic_user_propensity(int user) {
  return static_cast<double>(mix64(0x5eedULL + static_cast<std::uint64_t>(user)) >> 11) *
         0x1.0p-53;
}

inline SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  SyntheticCorpus corpus;
  corpus.schema_lines = {
      "editRatio\tnum",    "commentScore\tnum", "sizeDeltaA\tnum",
      "sizeDeltaB\tnum",   "activityIndex\tnum", "dwellTime\tnum",
      "userName\tcat",     "groupId\tcat",       "revisionTs\tdrop",
  };
  static const double kGroupEffect[6] = {-0.8, -0.4, 0.0, 0.2, 0.6, 1.0};

  const std::size_t n = spec.positives + spec.negatives;
  Pcg32 rng(derive_seed(spec.seed, "synthetic"));
  std::vector<double> latent(n);
  corpus.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RevisionRecord rec;
    char id[24];
    std::snprintf(id, sizeof(id), "r%06zu", i);
    rec.revision_id = id;
    // skewed batch sizes (u^2 piles mass onto the low batches)
    double u_batch = rng.next_double();
    int batch = static_cast<int>(std::floor(static_cast<double>(spec.batches) * u_batch * u_batch));
    if (batch >= spec.batches) batch = spec.batches - 1;
    rec.batch_id = "b" + std::to_string(batch);

    double x0 = rng.next_double();
    double x1 = rng.next_double();
    double x2 = rng.next_double() * 2.0 - 1.0;
    double x3 = rng.next_double() * 2.0 - 1.0;
    double x4 = (rng.next_double() + rng.next_double() + rng.next_double()) - 1.5;
    double x5 = -3.0 * std::log(1.0 - rng.next_double());
    int user = static_cast<int>(std::floor(40.0 * rng.next_double() * rng.next_double()));
    if (user > 39) user = 39;
    int group = static_cast<int>(rng.bounded(6));

    bool xor_signal = (x0 > 0.5) != (x1 > 0.5);
    bool band_signal = (std::abs(x2) < 0.35) != (x3 > 0.15);
    double propensity = synthetic_user_propensity(user);
    double noise = (rng.next_double() + rng.next_double() - 1.0) * spec.noise;
    latent[i] = 1.6 * (xor_signal ? 1.0 : 0.0) + 1.2 * (band_signal ? 1.0 : 0.0) +
                3.8 * (propensity - 0.5) + 1.4 * kGroupEffect[group] + 0.4 * x4 + noise;

    bool x4_missing = rng.next_double() < 0.05;
    bool x5_missing = rng.next_double() < 0.30;
    bool user_missing = rng.next_double() < 0.02;
    char user_token[16], group_token[8];
    std::snprintf(user_token, sizeof(user_token), "u%03d", user);
    std::snprintf(group_token, sizeof(group_token), "g%d", group);
    rec.values = {
        Value::number(x0),
        Value::number(x1),
        Value::number(x2),
        Value::number(x3),
        x4_missing ? Value::missing() : Value::number(x4),
        x5_missing ? Value::missing() : Value::number(x5),
        user_missing ? Value::missing() : Value::category(user_token),
        Value::category(group_token),
        Value::category("2017" + std::to_string(100000 + i)),
    };
    corpus.rows.push_back(std::move(rec));
  }

  // exactly `positives` rows with the largest latent score are vandalism
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return latent[a] > latent[b]; });
  for (std::size_t i = 0; i < n; ++i) corpus.rows[order[i]].label = i < spec.positives;
  return corpus;
}

struct SyntheticFiles {
  std::string schema_path;
  std::vector<std::string> data_paths;  // one per batch
  std::string truth_path;
};

inline SyntheticFiles write_synthetic_corpus(const SyntheticCorpus& corpus,
                                             const std::string& dir) {
  std::filesystem::create_directories(dir);
  SyntheticFiles files;
  files.schema_path = dir + "/schema.tsv";
  {
    std::ofstream out(files.schema_path, std::ios::binary);
    for (const std::string& line : corpus.schema_lines) out << line << "\n";
  }
  std::vector<std::string> batch_ids;
  for (const RevisionRecord& rec : corpus.rows)
    if (std::find(batch_ids.begin(), batch_ids.end(), rec.batch_id) == batch_ids.end())
      batch_ids.push_back(rec.batch_id);
  std::sort(batch_ids.begin(), batch_ids.end());
  for (const std::string& batch : batch_ids) {
    std::string path = dir + "/" + batch + ".tsv";
    std::ofstream out(path, std::ios::binary);
    for (const RevisionRecord& rec : corpus.rows)
      if (rec.batch_id == batch) {
        RevisionRecord unlabeled = rec;  // raw feature files carry no labels
        out << format_revision_row(unlabeled) << "\n";
      }
    files.data_paths.push_back(std::move(path));
  }
  files.truth_path = dir + "/truth.tsv";
  {
    std::ofstream out(files.truth_path, std::ios::binary);
    for (const RevisionRecord& rec : corpus.rows)
      out << rec.revision_id << '\t' << (*rec.label ? "true" : "false") << '\n';
  }
  return files;
}

}  // namespace vandet
