#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/learners/linear.hpp"  // sigmoid/clamp + class check
#include "vandet/learners/tree.hpp"
#include "vandet/matrix.hpp"
#include "vandet/parallel.hpp"

namespace vandet {

struct GbtParams {
  int rounds = 300;
  double learning_rate = 0.1;  // shrinkage, folded into stored leaf weights
  int max_depth = 6;
  double l2 = 1.0;             // lambda on leaf weights
  double min_split_gain = 0.0; // gamma
  double min_child_weight = 1.0;
};

// Second-order boosted trees on the logistic loss. Stored leaf weights
// already include the learning rate, so prediction is
// sigmoid(base_score + sum of leaf values).
struct GbtEnsemble {
  double base_score = 0.0;  // log-odds of the training positive fraction
  std::vector<Tree> trees;
  GbtParams params;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
};

// Split gain of the second-order objective:
//   1/2 * [ GL^2/(HL+l2) + GR^2/(HR+l2) - (GL+GR)^2/(HL+HR+l2) ] - gamma
inline double gbt_split_gain(double gl, double hl, double gr, double hr, double l2, double gamma) {
  double parent = (gl + gr) * (gl + gr) / (hl + hr + l2);
  return 0.5 * (gl * gl / (hl + l2) + gr * gr / (hr + l2) - parent) - gamma;
}

// Optimal leaf weight with shrinkage applied: -eta * G / (H + l2).
inline double gbt_leaf_weight(double g, double h, double l2, double eta) {
  double denom = h + l2;
  if (denom == 0.0) return 0.0;
  return -eta * g / denom;
}

namespace gbt_detail {

struct SplitCand {
  bool valid = false;
  double gain = 0.0;
  double threshold = 0.0;
  double g_left = 0.0, h_left = 0.0;
  std::uint32_t count_left = 0;
};

struct NodeStats {
  double g = 0.0, h = 0.0;
  std::uint32_t count = 0;
};

// Grows one depth-limited tree level by level with exact greedy split search
// over presorted feature columns. Candidate thresholds lie between distinct
// consecutive values; the winning split has the highest gain, ties resolved
// by lowest feature index then lowest threshold (the ascending scan sees the
// lowest threshold first, so strict improvement preserves both rules).
inline Tree grow_tree(const DesignMatrix& m,
                      const std::vector<std::vector<std::uint32_t>>& sorted_by_feature,
                      const std::vector<double>& grad, const std::vector<double>& hess,
                      const GbtParams& params, std::vector<std::int32_t>& node_of_row,
                      unsigned threads) {
  Tree tree;
  tree.nodes.push_back({});
  std::fill(node_of_row.begin(), node_of_row.end(), 0);

  std::vector<NodeStats> stats(1);
  for (std::size_t r = 0; r < m.rows; ++r) {
    stats[0].g += grad[r];
    stats[0].h += hess[r];
  }
  stats[0].count = static_cast<std::uint32_t>(m.rows);
  tree.nodes[0].n_samples = stats[0].count;

  std::vector<std::int32_t> active{0};
  for (int depth = 0; depth < params.max_depth && !active.empty(); ++depth) {
    const std::size_t n_active = active.size();
    std::vector<std::int32_t> slot_of_node(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < n_active; ++s) slot_of_node[active[s]] = static_cast<std::int32_t>(s);

    // per-feature best candidate per active node
    std::vector<std::vector<SplitCand>> feature_best(m.cols,
                                                     std::vector<SplitCand>(n_active));
    parallel_for(m.cols, threads, [&](std::size_t f) {
      struct Running {
        double g = 0.0, h = 0.0;
        std::uint32_t count = 0;
        double last_value = 0.0;
        bool started = false;
      };
      std::vector<Running> run(n_active);
      auto& best = feature_best[f];
      for (std::uint32_t r : sorted_by_feature[f]) {
        std::int32_t node = node_of_row[r];
        std::int32_t slot = slot_of_node[node];
        if (slot < 0) continue;
        Running& acc = run[static_cast<std::size_t>(slot)];
        double value = m.at(r, f);
        const NodeStats& total = stats[static_cast<std::size_t>(node)];
        if (acc.started && value > acc.last_value && acc.count > 0 && acc.count < total.count) {
          double gr = total.g - acc.g;
          double hr = total.h - acc.h;
          // midpoint must stay strictly above the left block, or routing by
          // `x < threshold` would not match the accumulated stats
          double threshold = (acc.last_value + value) / 2.0;
          if (threshold > acc.last_value && acc.h >= params.min_child_weight &&
              hr >= params.min_child_weight) {
            double gain =
                gbt_split_gain(acc.g, acc.h, gr, hr, params.l2, params.min_split_gain);
            SplitCand& cand = best[static_cast<std::size_t>(slot)];
            if (gain > 0.0 && (!cand.valid || gain > cand.gain)) {
              cand.valid = true;
              cand.gain = gain;
              cand.threshold = threshold;
              cand.g_left = acc.g;
              cand.h_left = acc.h;
              cand.count_left = acc.count;
            }
          }
        }
        acc.g += grad[r];
        acc.h += hess[r];
        ++acc.count;
        acc.last_value = value;
        acc.started = true;
      }
    });

    // deterministic reduction in feature order
    std::vector<SplitCand> winner(n_active);
    std::vector<std::int32_t> winner_feature(n_active, -1);
    for (std::size_t f = 0; f < m.cols; ++f)
      for (std::size_t s = 0; s < n_active; ++s) {
        const SplitCand& cand = feature_best[f][s];
        if (cand.valid && (!winner[s].valid || cand.gain > winner[s].gain)) {
          winner[s] = cand;
          winner_feature[s] = static_cast<std::int32_t>(f);
        }
      }

    std::vector<std::int32_t> next_active;
    std::vector<std::int32_t> split_left(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < n_active; ++s) {
      if (!winner[s].valid) continue;
      std::int32_t node_id = active[s];
      const NodeStats parent = stats[static_cast<std::size_t>(node_id)];
      std::int32_t left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.push_back({});
      std::int32_t right = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.push_back({});
      TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
      node.feature = winner_feature[s];
      node.threshold = winner[s].threshold;
      node.left = left;
      node.right = right;
      stats.resize(tree.nodes.size());
      stats[static_cast<std::size_t>(left)] = {winner[s].g_left, winner[s].h_left,
                                               winner[s].count_left};
      stats[static_cast<std::size_t>(right)] = {parent.g - winner[s].g_left,
                                                parent.h - winner[s].h_left,
                                                parent.count - winner[s].count_left};
      tree.nodes[static_cast<std::size_t>(left)].n_samples = winner[s].count_left;
      tree.nodes[static_cast<std::size_t>(right)].n_samples =
          parent.count - winner[s].count_left;
      split_left.resize(tree.nodes.size(), -1);
      split_left[static_cast<std::size_t>(node_id)] = left;
      next_active.push_back(left);
      next_active.push_back(right);
    }
    if (next_active.empty()) break;

    for (std::size_t r = 0; r < m.rows; ++r) {
      std::int32_t node = node_of_row[r];
      if (node >= 0 && static_cast<std::size_t>(node) < split_left.size() &&
          split_left[static_cast<std::size_t>(node)] >= 0) {
        const TreeNode& parent = tree.nodes[static_cast<std::size_t>(node)];
        node_of_row[r] = m.at(r, static_cast<std::size_t>(parent.feature)) < parent.threshold
                             ? parent.left
                             : parent.right;
      }
    }
    active = std::move(next_active);
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    TreeNode& node = tree.nodes[i];
    if (node.is_leaf())
      node.value = gbt_leaf_weight(stats[i].g, stats[i].h, params.l2, params.learning_rate);
  }
  return tree;
}

}  // namespace gbt_detail

inline GbtEnsemble gbt_fit(const DesignMatrix& m, const GbtParams& params, std::uint64_t seed,
                           unsigned threads = 1) {
  if (m.rows == 0 || !m.has_labels())
    raise(ErrorCode::SingleClassTraining, "gbt_fit needs a labeled non-empty matrix");
  detail::check_two_classes(m.labels);
  if (params.rounds < 0) raise(ErrorCode::BadConfigValue, "gbt rounds must be >= 0");
  if (params.max_depth < 0) raise(ErrorCode::BadConfigValue, "gbt max_depth must be >= 0");

  GbtEnsemble ensemble;
  ensemble.params = params;
  ensemble.seed = seed;
  ensemble.n_features = m.cols;
  double prior = std::accumulate(m.labels.begin(), m.labels.end(), 0.0) /
                 static_cast<double>(m.rows);
  ensemble.base_score = std::log(prior / (1.0 - prior));

  std::vector<std::vector<std::uint32_t>> sorted_by_feature(m.cols);
  parallel_for(m.cols, threads, [&](std::size_t f) {
    auto& order = sorted_by_feature[f];
    order.resize(m.rows);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      double va = m.at(a, f), vb = m.at(b, f);
      if (va != vb) return va < vb;
      return a < b;
    });
  });

  std::vector<double> margin(m.rows, ensemble.base_score);
  std::vector<double> grad(m.rows), hess(m.rows);
  std::vector<std::int32_t> node_of_row(m.rows, 0);
  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (!std::isfinite(margin[r]))
        raise(ErrorCode::NonFiniteMargin, "margin diverged at round " + std::to_string(round));
      double p = sigmoid(margin[r]);
      grad[r] = p - m.labels[r];
      hess[r] = p * (1.0 - p);
    }
    Tree tree =
        gbt_detail::grow_tree(m, sorted_by_feature, grad, hess, params, node_of_row, threads);
    for (std::size_t r = 0; r < m.rows; ++r)
      margin[r] += tree.nodes[static_cast<std::size_t>(node_of_row[r])].value;
    ensemble.trees.push_back(std::move(tree));
  }
  return ensemble;
}

inline std::vector<double> gbt_score(const GbtEnsemble& ensemble, const DesignMatrix& m,
                                     unsigned threads = 1) {
  if (m.cols != ensemble.n_features)
    raise(ErrorCode::DimensionMismatch, "matrix has " + std::to_string(m.cols) +
                                            " columns, ensemble expects " +
                                            std::to_string(ensemble.n_features));
  std::vector<double> scores(m.rows);
  parallel_for(m.rows, threads, [&](std::size_t r) {
    double z = ensemble.base_score;
    for (const Tree& tree : ensemble.trees) z += tree.leaf_value(m.row(r));
    scores[r] = clamp_score(sigmoid(z));
  });
  return scores;
}

}  // namespace vandet
