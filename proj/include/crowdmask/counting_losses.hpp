#pragma once

#include <span>
#include <vector>

#include "crowdmask/assignment.hpp"
#include "crowdmask/types.hpp"

namespace crowdmask {

// Mask-supervised density loss:
//   L = (1/N) * sum_i (S_i - 1)^2 + S_bg^2
// with S_i the density summed over mask i and S_bg the summed density of
// pixels in no mask. N = 0 reduces to (sum of all density)^2.
double density_mask_loss(const DensityMap& map, std::span<const RasterMask> masks);
double density_mask_loss(std::span<const double> values, int width, int height,
                         std::span<const RasterMask> masks);

// dL/dp: (2/N)(S_i - 1) on mask i, 2*S_bg on background.
std::vector<double> density_mask_loss_grad(const DensityMap& map,
                                           std::span<const RasterMask> masks);
std::vector<double> density_mask_loss_grad(std::span<const double> values, int width,
                                           int height, std::span<const RasterMask> masks);

struct MatchingProblem {
  std::vector<Point2D> preds;
  std::vector<Point2D> gts;
  // Regions aligned with gts; a pred is inside when its pixel is set.
  std::vector<RasterMask> masks;
};

void validate(const MatchingProblem& problem);

struct Matching {
  // (pred index, gt index), sorted by gt index.
  Assignment pairs;
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gt;
  double total_cost = 0.0;
};

// Greedy rule per gt mask: one pred inside is paired; several inside pair the
// nearest and demote the rest to background; none inside takes the nearest
// remaining background pred, masks handled in ascending index.
Matching match_three_case(const MatchingProblem& problem);

// Globally optimal assignment with cost d_ij when pred i lies in mask j and
// forbidden otherwise; gts whose mask holds no pred may pair with any pred at
// cost d_ij. Maximizes the number of pairs, then minimizes total distance.
Matching match_exact(const MatchingProblem& problem);

}  // namespace crowdmask
