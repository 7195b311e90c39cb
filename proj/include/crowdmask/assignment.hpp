#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace crowdmask {

// Dense row-major cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

using Assignment = std::vector<std::pair<std::size_t, std::size_t>>;

// Minimum-cost one-to-one assignment of min(rows, cols) pairs (Hungarian
// method with potentials, O(k^2 * max) for k = min(rows, cols)). Pairs are
// returned sorted by row.
Assignment solve_assignment(const CostMatrix& cost);

}  // namespace crowdmask
