#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vandet {

// Dense row-major numeric matrix with aligned labels and row provenance.
// After features::transform it contains only finite values; labels are 0/1
// and empty when the rows were unlabeled.
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;          // rows * cols, row-major
  std::vector<double> labels;        // empty or size == rows, values in {0,1}
  std::vector<std::string> row_ids;  // size == rows
  std::vector<std::string> column_names;

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  bool has_labels() const { return !labels.empty(); }
};

}  // namespace vandet
