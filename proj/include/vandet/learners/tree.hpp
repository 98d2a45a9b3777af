#pragma once

#include <cstdint>
#include <vector>

namespace vandet {

// Binary tree stored as a node array, root at index 0. Internal nodes route
// x[feature] < threshold to `left`, else to `right`; leaves carry `value`
// (class fraction for extremely randomized trees, additive weight for boosted
// trees).
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
  std::uint32_t n_samples = 0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  double leaf_value(const double* x) const {
    std::int32_t i = 0;
    while (!nodes[i].is_leaf())
      i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
  }
};

}  // namespace vandet
