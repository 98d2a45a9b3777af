#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/learners/linear.hpp"  // sigmoid/clamp helpers + class check
#include "vandet/learners/tree.hpp"
#include "vandet/matrix.hpp"
#include "vandet/parallel.hpp"
#include "vandet/prng.hpp"

namespace vandet {

struct ErtParams {
  int n_trees = 300;
  int features_per_split = 0;  // 0 => ceil(sqrt(d))
  int min_samples_leaf = 1;
};

struct ExtraTreesForest {
  std::vector<Tree> trees;
  ErtParams params;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
};

namespace ert_detail {

// Grows one tree on the full training set: at every node, K random candidate
// features among the non-constant ones, one uniform cut-point per candidate
// inside that feature's node range, best Gini decrease wins. Nodes stop when
// pure, smaller than 2*min_samples_leaf, or featureless.
class TreeBuilder {
 public:
  TreeBuilder(const DesignMatrix& m, const ErtParams& params, std::uint64_t tree_seed)
      : m_(m), params_(params), rng_(tree_seed) {
    k_ = params.features_per_split > 0
             ? params.features_per_split
             : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m.cols))));
    if (k_ < 1) k_ = 1;
    if (k_ > static_cast<int>(m.cols)) k_ = static_cast<int>(m.cols);
  }

  Tree build() {
    Tree tree;
    rows_.resize(m_.rows);
    for (std::size_t i = 0; i < m_.rows; ++i) rows_[i] = i;
    struct Job {
      std::size_t lo, hi;
      std::int32_t node;
    };
    tree.nodes.push_back({});
    std::vector<Job> stack{{0, m_.rows, 0}};
    while (!stack.empty()) {
      Job job = stack.back();
      stack.pop_back();
      std::size_t n = job.hi - job.lo;
      std::size_t pos = 0;
      for (std::size_t i = job.lo; i < job.hi; ++i)
        if (m_.labels[rows_[i]] > 0.5) ++pos;
      TreeNode& node = tree.nodes[job.node];
      node.n_samples = static_cast<std::uint32_t>(n);
      bool pure = pos == 0 || pos == n;
      if (pure || n < 2 * static_cast<std::size_t>(params_.min_samples_leaf)) {
        make_leaf(tree.nodes[job.node], pos, n);
        continue;
      }
      Split split;
      if (!choose_split(job.lo, job.hi, pos, split)) {
        make_leaf(tree.nodes[job.node], pos, n);
        continue;
      }
      std::size_t mid = partition_rows(job.lo, job.hi, split);
      std::int32_t left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.push_back({});
      std::int32_t right = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.push_back({});
      TreeNode& parent = tree.nodes[job.node];  // re-take: vector may have grown
      parent.feature = static_cast<std::int32_t>(split.feature);
      parent.threshold = split.threshold;
      parent.left = left;
      parent.right = right;
      // left child first: push it last so the LIFO pops it next
      stack.push_back({mid, job.hi, right});
      stack.push_back({job.lo, mid, left});
    }
    return tree;
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = -1.0;  // Gini impurity decrease
  };

  static void make_leaf(TreeNode& node, std::size_t pos, std::size_t n) {
    node.feature = -1;
    node.value = static_cast<double>(pos) / static_cast<double>(n);
  }

  static double gini(double pos, double n) {
    if (n <= 0.0) return 0.0;
    double p = pos / n;
    return 2.0 * p * (1.0 - p);
  }

  bool choose_split(std::size_t lo, std::size_t hi, std::size_t pos_total, Split& best) {
    // non-constant features over this node's samples
    candidates_.clear();
    for (std::size_t f = 0; f < m_.cols; ++f) {
      double mn = m_.at(rows_[lo], f), mx = mn;
      for (std::size_t i = lo + 1; i < hi; ++i) {
        double v = m_.at(rows_[i], f);
        if (v < mn) mn = v;
        if (v > mx) mx = v;
      }
      if (mx > mn) candidates_.push_back({f, mn, mx});
    }
    if (candidates_.empty()) return false;
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), candidates_.size());
    // partial Fisher-Yates: first k entries become the drawn candidates
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng_.bounded(candidates_.size() - i));
      std::swap(candidates_[i], candidates_[j]);
    }
    double n = static_cast<double>(hi - lo);
    double parent_gini = gini(static_cast<double>(pos_total), n);
    best = Split{};
    bool found = false;
    for (std::size_t ci = 0; ci < k; ++ci) {
      const auto& cand = candidates_[ci];
      double threshold = 0.0;
      bool ok = false;
      for (int attempt = 0; attempt < 8; ++attempt) {
        double u = rng_.next_double();
        threshold = cand.mn + u * (cand.mx - cand.mn);
        if (threshold > cand.mn && threshold < cand.mx) {
          ok = true;
          break;
        }
      }
      if (!ok) continue;  // degenerate float range
      double n_left = 0.0, pos_left = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        if (m_.at(rows_[i], cand.feature) < threshold) {
          n_left += 1.0;
          if (m_.labels[rows_[i]] > 0.5) pos_left += 1.0;
        }
      }
      double n_right = n - n_left;
      double pos_right = static_cast<double>(pos_total) - pos_left;
      double decrease = parent_gini - (n_left / n) * gini(pos_left, n_left) -
                        (n_right / n) * gini(pos_right, n_right);
      if (!found || decrease > best.score) {
        best.feature = cand.feature;
        best.threshold = threshold;
        best.score = decrease;
        found = true;
      }
    }
    return found;
  }

  std::size_t partition_rows(std::size_t lo, std::size_t hi, const Split& split) {
    auto begin = rows_.begin() + static_cast<std::ptrdiff_t>(lo);
    auto end = rows_.begin() + static_cast<std::ptrdiff_t>(hi);
    auto mid = std::stable_partition(begin, end, [&](std::size_t r) {
      return m_.at(r, split.feature) < split.threshold;
    });
    return static_cast<std::size_t>(mid - rows_.begin());
  }

  struct Candidate {
    std::size_t feature;
    double mn, mx;
  };

  const DesignMatrix& m_;
  const ErtParams& params_;
  Pcg32 rng_;
  int k_;
  std::vector<std::size_t> rows_;
  std::vector<Candidate> candidates_;
};

}  // namespace ert_detail

inline std::uint64_t ert_tree_seed(std::uint64_t seed, int tree_index) {
  return derive_seed(derive_seed(seed, "ert"), static_cast<std::uint64_t>(tree_index));
}

// Trees are independent given their derived seeds, so growing them in
// parallel cannot change the forest.
inline ExtraTreesForest ert_fit(const DesignMatrix& m, const ErtParams& params,
                                std::uint64_t seed, unsigned threads = 1) {
  if (m.rows == 0 || !m.has_labels())
    raise(ErrorCode::SingleClassTraining, "ert_fit needs a labeled non-empty matrix");
  detail::check_two_classes(m.labels);
  if (params.n_trees < 1) raise(ErrorCode::BadConfigValue, "ert n_trees must be >= 1");
  if (params.min_samples_leaf < 1)
    raise(ErrorCode::BadConfigValue, "ert min_samples_leaf must be >= 1");
  ExtraTreesForest forest;
  forest.params = params;
  forest.seed = seed;
  forest.n_features = m.cols;
  forest.trees.resize(static_cast<std::size_t>(params.n_trees));
  parallel_for(forest.trees.size(), threads, [&](std::size_t i) {
    ert_detail::TreeBuilder builder(m, params, ert_tree_seed(seed, static_cast<int>(i)));
    forest.trees[i] = builder.build();
  });
  return forest;
}

// Mean leaf fraction across trees, clamped into the open interval.
inline std::vector<double> ert_score(const ExtraTreesForest& forest, const DesignMatrix& m,
                                     unsigned threads = 1) {
  if (m.cols != forest.n_features)
    raise(ErrorCode::DimensionMismatch, "matrix has " + std::to_string(m.cols) +
                                            " columns, forest expects " +
                                            std::to_string(forest.n_features));
  std::vector<double> scores(m.rows);
  const double kEps = 1e-9;
  parallel_for(m.rows, threads, [&](std::size_t r) {
    double sum = 0.0;
    for (const Tree& tree : forest.trees) sum += tree.leaf_value(m.row(r));
    scores[r] = clamp_score(sum / static_cast<double>(forest.trees.size()), kEps);
  });
  return scores;
}

}  // namespace vandet
