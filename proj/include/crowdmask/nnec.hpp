#pragma once

#include <span>
#include <vector>

#include "crowdmask/types.hpp"

namespace crowdmask {

struct NnecParams {
  double r_min = 5.0;
  double r_max = 200.0;
  // The radius is d - delta so the circle stays strictly inside the
  // nearest neighbor distance d.
  double delta = 1.0;
  // Non-overlapping ablation: radius from d/2 instead of d.
  bool bounded = false;
};

void validate(const NnecParams& params);

// Radius for a known nearest-neighbor distance (infinite when alone).
double nnec_radius_from_distance(double nearest_distance, const NnecParams& params);

// Exclusion circle of points[i]; brute force over all other points.
ExclusionCircle nnec_radius(std::span<const Point2D> points, std::size_t i,
                            const NnecParams& params);

// All circles. Uses a uniform bucket grid and OpenMP for large inputs and
// returns exactly what all_radii_reference returns.
std::vector<ExclusionCircle> all_radii(std::span<const Point2D> points,
                                       const NnecParams& params);

// Serial O(n^2) pairwise computation kept as the reference.
std::vector<ExclusionCircle> all_radii_reference(std::span<const Point2D> points,
                                                 const NnecParams& params);

// Nearest-neighbor squared distances via the bucket grid (infinity for a
// lone point). Exposed for the scorer features and for benchmarking.
std::vector<double> nearest_neighbor_sq(std::span<const Point2D> points);

// Pixel (c,r) is set iff (c+0.5-cx)^2 + (r+0.5-cy)^2 <= radius^2.
RasterMask rasterize_circle(const ExclusionCircle& circle, int width, int height);
PixelBox circle_box(const ExclusionCircle& circle, int width, int height);

struct ConstrainResult {
  RasterMask mask;
  bool fallback = false;
};

// proposal & circle when non-empty, else the rasterized circle.
ConstrainResult constrain(const RasterMask* proposal, const ExclusionCircle& circle, int width,
                          int height);

// Makes masks pairwise disjoint: a pixel claimed by several masks goes to the
// claimant whose center is nearest the pixel center (ties: lowest index).
std::vector<RasterMask> resolve_overlaps(std::span<const RasterMask> masks,
                                         std::span<const Point2D> centers);

}  // namespace crowdmask
