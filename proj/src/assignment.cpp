#include "crowdmask/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crowdmask/error.hpp"

namespace crowdmask {

Assignment solve_assignment(const CostMatrix& cost) {
  if (cost.values.size() != cost.rows * cost.cols) {
    throw Error(ErrorKind::SizeMismatch, "cost matrix storage does not match its shape");
  }
  for (double v : cost.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "cost entries must be finite");
  }
  if (cost.rows == 0 || cost.cols == 0) return {};

  // Work on the orientation with no more rows than columns.
  const bool transposed = cost.rows > cost.cols;
  const std::size_t n = transposed ? cost.cols : cost.rows;
  const std::size_t m = transposed ? cost.rows : cost.cols;
  const auto a = [&](std::size_t i, std::size_t j) {
    return transposed ? cost.at(j - 1, i - 1) : cost.at(i - 1, j - 1);
  };

  // 1-based shortest augmenting path formulation; column 0 is a sentinel.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.reserve(n);
  for (std::size_t j = 1; j <= m; ++j) {
    if (match[j] == 0) continue;
    if (transposed) {
      out.emplace_back(j - 1, match[j] - 1);
    } else {
      out.emplace_back(match[j] - 1, j - 1);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace crowdmask
