#include "crowdmask/counting_losses.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "crowdmask/error.hpp"

namespace crowdmask {

namespace {

struct MaskSums {
  std::vector<double> per_mask;
  double background = 0.0;
  // Pixel -> mask index or -1.
  std::vector<std::int32_t> label;
};

MaskSums sum_by_mask(std::span<const double> values, int width, int height,
                     std::span<const RasterMask> masks) {
  if (width <= 0 || height <= 0 ||
      values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::SizeMismatch, "density values do not match width*height");
  }
  MaskSums s;
  s.label.assign(values.size(), -1);
  s.per_mask.assign(masks.size(), 0.0);
  for (std::size_t k = 0; k < masks.size(); ++k) {
    if (masks[k].width() != width || masks[k].height() != height) {
      throw Error(ErrorKind::SizeMismatch, "mask does not match the density map");
    }
    const auto bits = masks[k].bits();
    for (std::size_t p = 0; p < bits.size(); ++p) {
      if (!bits[p]) continue;
      if (s.label[p] >= 0) throw Error(ErrorKind::InvalidArgument, "masks overlap");
      s.label[p] = static_cast<std::int32_t>(k);
    }
  }
  for (std::size_t p = 0; p < values.size(); ++p) {
    if (s.label[p] >= 0) {
      s.per_mask[static_cast<std::size_t>(s.label[p])] += values[p];
    } else {
      s.background += values[p];
    }
  }
  return s;
}

std::vector<double> widen(const DensityMap& map) {
  if (map.values.size() != static_cast<std::size_t>(map.width) * map.height) {
    throw Error(ErrorKind::SizeMismatch, "density value count does not match width*height");
  }
  return {map.values.begin(), map.values.end()};
}

std::size_t pred_owner_none = static_cast<std::size_t>(-1);

// Mask index holding each pred, or pred_owner_none.
std::vector<std::size_t> locate(const MatchingProblem& problem) {
  std::vector<std::size_t> where(problem.preds.size(), pred_owner_none);
  for (std::size_t i = 0; i < problem.preds.size(); ++i) {
    for (std::size_t j = 0; j < problem.masks.size(); ++j) {
      if (problem.masks[j].contains(problem.preds[i])) {
        where[i] = j;
        break;
      }
    }
  }
  return where;
}

Matching finish(const MatchingProblem& problem, Assignment pairs) {
  Matching out;
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  std::vector<char> pred_used(problem.preds.size(), 0), gt_used(problem.gts.size(), 0);
  for (const auto& [i, j] : pairs) {
    pred_used[i] = 1;
    gt_used[j] = 1;
    out.total_cost += distance(problem.preds[i], problem.gts[j]);
  }
  for (std::size_t i = 0; i < pred_used.size(); ++i) {
    if (!pred_used[i]) out.unmatched_pred.push_back(i);
  }
  for (std::size_t j = 0; j < gt_used.size(); ++j) {
    if (!gt_used[j]) out.unmatched_gt.push_back(j);
  }
  out.pairs = std::move(pairs);
  return out;
}

}  // namespace

double density_mask_loss(std::span<const double> values, int width, int height,
                         std::span<const RasterMask> masks) {
  const MaskSums s = sum_by_mask(values, width, height, masks);
  double mask_term = 0.0;
  for (double v : s.per_mask) mask_term += (v - 1.0) * (v - 1.0);
  if (!masks.empty()) mask_term /= static_cast<double>(masks.size());
  return mask_term + s.background * s.background;
}

double density_mask_loss(const DensityMap& map, std::span<const RasterMask> masks) {
  const auto values = widen(map);
  return density_mask_loss(values, map.width, map.height, masks);
}

std::vector<double> density_mask_loss_grad(std::span<const double> values, int width,
                                           int height, std::span<const RasterMask> masks) {
  const MaskSums s = sum_by_mask(values, width, height, masks);
  const double n = static_cast<double>(masks.size());
  std::vector<double> grad(values.size());
  for (std::size_t p = 0; p < values.size(); ++p) {
    const std::int32_t k = s.label[p];
    grad[p] = k >= 0 ? 2.0 / n * (s.per_mask[static_cast<std::size_t>(k)] - 1.0)
                     : 2.0 * s.background;
  }
  return grad;
}

std::vector<double> density_mask_loss_grad(const DensityMap& map,
                                           std::span<const RasterMask> masks) {
  const auto values = widen(map);
  return density_mask_loss_grad(values, map.width, map.height, masks);
}

void validate(const MatchingProblem& problem) {
  if (problem.masks.size() != problem.gts.size()) {
    throw Error(ErrorKind::LengthMismatch, "masks and gt points differ in length");
  }
  if (problem.preds.empty() && !problem.gts.empty()) {
    throw Error(ErrorKind::NoPredictions, "no predicted points to match");
  }
  for (std::size_t j = 1; j < problem.masks.size(); ++j) {
    if (!problem.masks[j].same_shape(problem.masks[0])) {
      throw Error(ErrorKind::SizeMismatch, "masks differ in size");
    }
  }
}

Matching match_three_case(const MatchingProblem& problem) {
  validate(problem);
  const auto where = locate(problem);
  std::vector<char> background(problem.preds.size(), 0);
  for (std::size_t i = 0; i < where.size(); ++i) background[i] = where[i] == pred_owner_none;

  Assignment pairs;
  std::vector<std::size_t> empty_masks;
  for (std::size_t j = 0; j < problem.gts.size(); ++j) {
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (std::size_t i = 0; i < where.size(); ++i) {
      if (where[i] != j) continue;
      const double d = squared_distance(problem.preds[i], problem.gts[j]);
      if (!best || d < best_d) {
        if (best) background[*best] = 1;
        best = i;
        best_d = d;
      } else {
        background[i] = 1;
      }
    }
    if (best) {
      pairs.emplace_back(*best, j);
    } else {
      empty_masks.push_back(j);
    }
  }

  for (std::size_t j : empty_masks) {
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (std::size_t i = 0; i < background.size(); ++i) {
      if (!background[i]) continue;
      const double d = squared_distance(problem.preds[i], problem.gts[j]);
      if (!best || d < best_d) {
        best = i;
        best_d = d;
      }
    }
    if (!best) continue;
    background[*best] = 0;
    pairs.emplace_back(*best, j);
  }
  return finish(problem, std::move(pairs));
}

Matching match_exact(const MatchingProblem& problem) {
  validate(problem);
  const std::size_t m = problem.preds.size();
  const std::size_t n = problem.gts.size();
  if (m == 0 || n == 0) return finish(problem, {});
  const auto where = locate(problem);
  std::vector<char> column_empty(n, 1);
  for (std::size_t w : where) {
    if (w != pred_owner_none) column_empty[w] = 0;
  }

  // Forbidden pairs carry a sentinel larger than any feasible total, so the
  // optimum first avoids sentinels (maximal pair count) and then minimizes
  // distance. The sentinel is sized from the data to keep distances exact.
  std::vector<char> allowed(m * n, 0);
  double feasible_total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (where[i] == j || column_empty[j]) {
        allowed[i * n + j] = 1;
        feasible_total += distance(problem.preds[i], problem.gts[j]);
      }
    }
  }
  const double forbidden = 2.0 * feasible_total + 1.0;
  const std::size_t k = std::max(m, n);
  CostMatrix cost(k, k, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost.at(i, j) = allowed[i * n + j] ? distance(problem.preds[i], problem.gts[j]) : forbidden;
    }
  }
  // Dummy rows/columns cost the sentinel too, so leaving a real gt or pred
  // unpaired is never cheaper than a feasible pairing.
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i >= m || j >= n) cost.at(i, j) = forbidden;
    }
  }
  Assignment pairs;
  for (const auto& [i, j] : solve_assignment(cost)) {
    if (i < m && j < n && allowed[i * n + j]) pairs.emplace_back(i, j);
  }
  return finish(problem, std::move(pairs));
}

}  // namespace crowdmask
