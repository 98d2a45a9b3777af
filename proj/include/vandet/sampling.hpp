#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/ingest.hpp"
#include "vandet/parallel.hpp"
#include "vandet/prng.hpp"

namespace vandet {

struct SampleConfig {
  double negative_ratio = 2.5;   // sampled negatives per retained positive
  double train_fraction = 0.8;
  int k_folds = 5;
  std::uint64_t seed = 0;
  bool clamp_insufficient = false;  // take every negative instead of failing

  void validate() const {
    if (!(negative_ratio > 0.0))
      raise(ErrorCode::BadConfigValue, "sample.negative_ratio must be > 0");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
      raise(ErrorCode::BadConfigValue, "sample.train_fraction must be in (0,1)");
    if (k_folds < 2) raise(ErrorCode::BadConfigValue, "sample.k_folds must be >= 2");
  }
};

struct SamplePlan {
  std::map<std::string, std::uint64_t> per_batch_negative_quota;
  std::uint64_t total_positives = 0;
  std::uint64_t total_negatives_target = 0;
  bool clamped = false;
};

enum class SplitRole { train, validation };

struct SplitAssignment {
  // row_id -> role; fold ids only for train rows.
  std::unordered_map<std::string, SplitRole> role;
  std::unordered_map<std::string, int> fold;
};

inline std::uint64_t round_half_up(double x) {
  return static_cast<std::uint64_t>(std::floor(x + 0.5));
}

// Largest-remainder apportionment of `target_total` across batches in
// proportion to `counts`; remainder ties go to the lexicographically smallest
// batch id. Quotas always sum to target_total exactly. Callers are
// responsible for target_total <= sum(counts) when counts are capacities.
inline std::map<std::string, std::uint64_t> allocate_negative_quota(
    const std::map<std::string, std::uint64_t>& counts, std::uint64_t target_total) {
  std::map<std::string, std::uint64_t> quota;
  if (counts.empty()) {
    if (target_total > 0)
      raise(ErrorCode::InsufficientNegatives, "no batches to allocate from");
    return quota;
  }
  unsigned __int128 total = 0;
  for (const auto& [id, c] : counts) total += c;
  if (total == 0) {
    if (target_total > 0)
      raise(ErrorCode::InsufficientNegatives, "no negatives available in any batch");
    for (const auto& [id, c] : counts) quota[id] = 0;
    return quota;
  }
  std::uint64_t assigned = 0;
  // remainder = (count*target) mod total, in exact integer arithmetic
  std::vector<std::pair<unsigned __int128, std::string>> remainders;
  for (const auto& [id, c] : counts) {
    unsigned __int128 share = static_cast<unsigned __int128>(c) * target_total;
    std::uint64_t q = static_cast<std::uint64_t>(share / total);
    quota[id] = q;
    assigned += q;
    remainders.emplace_back(share % total, id);
  }
  std::uint64_t leftover = target_total - assigned;
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::uint64_t i = 0; i < leftover; ++i)
    ++quota[remainders[i % remainders.size()].second];
  return quota;
}

// Algorithm-R reservoir over one batch's negatives, keyed by a per-batch seed.
// Records are kept with their stream index so the final sample can be emitted
// in stream order.
class BatchReservoir {
 public:
  BatchReservoir(std::uint64_t quota, std::uint64_t seed) : quota_(quota), rng_(seed) {}

  void offer(RevisionRecord rec, std::uint64_t stream_index) {
    if (quota_ == 0) {
      ++seen_;
      return;
    }
    if (slots_.size() < quota_) {
      slots_.emplace_back(stream_index, std::move(rec));
    } else {
      std::uint64_t j = rng_.bounded(seen_ + 1);
      if (j < quota_) slots_[static_cast<std::size_t>(j)] = {stream_index, std::move(rec)};
    }
    ++seen_;
  }

  std::vector<std::pair<std::uint64_t, RevisionRecord>> finish() {
    std::sort(slots_.begin(), slots_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return std::move(slots_);
  }

  std::uint64_t seen() const { return seen_; }

 private:
  std::uint64_t quota_;
  std::uint64_t seen_ = 0;
  Pcg32 rng_;
  std::vector<std::pair<std::uint64_t, RevisionRecord>> slots_;
};

inline std::uint64_t batch_sample_seed(std::uint64_t seed, const std::string& batch_id) {
  return derive_seed(seed, "sample-batch:" + batch_id);
}

// One batch's labeled records, replayable: calling `replay(sink)` twice must
// emit the identical sequence. Unlabeled records are ignored by the sampler.
struct BatchSource {
  std::string batch_id;
  std::function<void(const std::function<void(const RevisionRecord&)>&)> replay;
};

struct SubsampleResult {
  std::vector<RevisionRecord> rows;  // batch order, then stream order
  SamplePlan plan;
  std::map<std::string, std::uint64_t> per_batch_positives;
  std::map<std::string, std::uint64_t> per_batch_negatives;  // available
  std::map<std::string, std::uint64_t> per_batch_sampled_negatives;
};

// Keep every positive; per batch, draw exactly its quota of negatives without
// replacement. Two passes over the sources: count, then sample. Batches run
// independently (safe to parallelize); the merged output order is fixed by
// (source order, stream index) so results do not depend on scheduling.
inline SubsampleResult subsample(const std::vector<BatchSource>& sources,
                                 const SampleConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  {
    std::set<std::string> ids;
    for (const BatchSource& source : sources)
      if (!ids.insert(source.batch_id).second)
        raise(ErrorCode::DuplicateBatchId, "batch id `" + source.batch_id + "` appears twice");
  }
  SubsampleResult out;

  // pass 1: class counts per batch
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts(sources.size());  // (pos, neg)
  parallel_for(sources.size(), threads, [&](std::size_t b) {
    std::uint64_t pos = 0, neg = 0;
    sources[b].replay([&](const RevisionRecord& rec) {
      if (!rec.label) return;
      (*rec.label ? pos : neg) += 1;
    });
    counts[b] = {pos, neg};
  });

  std::uint64_t total_pos = 0, total_neg = 0;
  std::map<std::string, std::uint64_t> neg_by_batch;
  for (std::size_t b = 0; b < sources.size(); ++b) {
    total_pos += counts[b].first;
    total_neg += counts[b].second;
    out.per_batch_positives[sources[b].batch_id] = counts[b].first;
    out.per_batch_negatives[sources[b].batch_id] = counts[b].second;
    neg_by_batch[sources[b].batch_id] = counts[b].second;
  }

  std::uint64_t target = round_half_up(cfg.negative_ratio * static_cast<double>(total_pos));
  if (target > total_neg) {
    if (!cfg.clamp_insufficient)
      raise(ErrorCode::InsufficientNegatives,
            "need " + std::to_string(target) + " negatives, only " + std::to_string(total_neg) +
                " available (use clamp to take all)");
    target = total_neg;
    out.plan.clamped = true;
  }
  out.plan.total_positives = total_pos;
  out.plan.total_negatives_target = target;
  out.plan.per_batch_negative_quota = allocate_negative_quota(neg_by_batch, target);

  // pass 2: keep positives, reservoir-sample negatives
  std::vector<std::vector<std::pair<std::uint64_t, RevisionRecord>>> kept(sources.size());
  parallel_for(sources.size(), threads, [&](std::size_t b) {
    const std::string& batch_id = sources[b].batch_id;
    std::uint64_t quota = out.plan.per_batch_negative_quota.at(batch_id);
    BatchReservoir reservoir(quota, batch_sample_seed(cfg.seed, batch_id));
    std::vector<std::pair<std::uint64_t, RevisionRecord>> positives;
    std::uint64_t index = 0;
    sources[b].replay([&](const RevisionRecord& rec) {
      std::uint64_t i = index++;
      if (!rec.label) return;
      if (*rec.label) positives.emplace_back(i, rec);
      else reservoir.offer(rec, i);
    });
    auto negatives = reservoir.finish();
    std::vector<std::pair<std::uint64_t, RevisionRecord>> merged;
    merged.reserve(positives.size() + negatives.size());
    std::merge(positives.begin(), positives.end(), negatives.begin(), negatives.end(),
               std::back_inserter(merged),
               [](const auto& a, const auto& b) { return a.first < b.first; });
    kept[b] = std::move(merged);
  });

  for (std::size_t b = 0; b < sources.size(); ++b) {
    std::uint64_t sampled_neg = 0;
    for (auto& [idx, rec] : kept[b]) {
      if (rec.label && !*rec.label) ++sampled_neg;
      out.rows.push_back(std::move(rec));
    }
    out.per_batch_sampled_negatives[sources[b].batch_id] = sampled_neg;
  }
  return out;
}

// Convenience wrapper for in-memory datasets: batches in first-appearance order.
inline SubsampleResult subsample(const std::vector<RevisionRecord>& records,
                                 const SampleConfig& cfg, unsigned threads = 1) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const RevisionRecord*>> by_batch;
  for (const auto& rec : records) {
    auto [it, inserted] = by_batch.try_emplace(rec.batch_id);
    if (inserted) order.push_back(rec.batch_id);
    it->second.push_back(&rec);
  }
  std::vector<BatchSource> sources;
  sources.reserve(order.size());
  for (const std::string& id : order) {
    const auto* rows = &by_batch.at(id);
    sources.push_back(BatchSource{
        id, [rows](const std::function<void(const RevisionRecord&)>& sink) {
          for (const RevisionRecord* r : *rows) sink(*r);
        }});
  }
  return subsample(sources, cfg, threads);
}

// Unstratified 80/20-style split: a seeded permutation of the row ids (sorted
// first, so the result depends only on the id set and the seed) with the
// first round(train_fraction * n) ids assigned to train.
inline SplitAssignment train_val_split(std::vector<std::string> row_ids,
                                       const SampleConfig& cfg) {
  cfg.validate();
  if (row_ids.empty()) raise(ErrorCode::DegenerateSplit, "empty dataset");
  std::sort(row_ids.begin(), row_ids.end());
  Pcg32 rng(derive_seed(cfg.seed, "train-val-split"));
  rng.shuffle(row_ids);
  std::uint64_t n_train = round_half_up(cfg.train_fraction * static_cast<double>(row_ids.size()));
  if (n_train == 0 || n_train == row_ids.size())
    raise(ErrorCode::DegenerateSplit,
          "split of " + std::to_string(row_ids.size()) + " rows at fraction " +
              std::to_string(cfg.train_fraction) + " leaves one side empty");
  SplitAssignment split;
  for (std::size_t i = 0; i < row_ids.size(); ++i)
    split.role[row_ids[i]] = i < n_train ? SplitRole::train : SplitRole::validation;
  return split;
}

// Stratified k-fold assignment over (row id, label) pairs. Within each class
// the ids are sorted, shuffled with a per-class derived seed, and dealt
// round-robin, so fold sizes per class differ by at most one and the result
// is a pure function of (id set, labels, k, seed).
inline std::unordered_map<std::string, int> kfold_assign(
    const std::vector<std::pair<std::string, bool>>& labeled_ids, int k, std::uint64_t seed) {
  if (k < 2) raise(ErrorCode::BadConfigValue, "k_folds must be >= 2");
  std::vector<std::string> pos, neg;
  for (const auto& [id, label] : labeled_ids) (label ? pos : neg).push_back(id);
  std::size_t minority = std::min(pos.size(), neg.size());
  if (minority < static_cast<std::size_t>(k))
    raise(ErrorCode::TooFewMinoritySamples,
          "minority class has " + std::to_string(minority) + " rows, need >= " + std::to_string(k));
  std::unordered_map<std::string, int> fold;
  auto deal = [&](std::vector<std::string>& ids, const char* tag) {
    std::sort(ids.begin(), ids.end());
    Pcg32 rng(derive_seed(seed, tag));
    rng.shuffle(ids);
    for (std::size_t i = 0; i < ids.size(); ++i)
      fold[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  };
  deal(pos, "kfold-pos");
  deal(neg, "kfold-neg");
  return fold;
}

}  // namespace vandet
