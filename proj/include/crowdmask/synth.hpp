#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crowdmask/rng.hpp"
#include "crowdmask/types.hpp"

namespace crowdmask {

enum class DensityRegime { Sparse, Dense, Mixed };

DensityRegime parse_regime(const std::string& name);
const char* to_string(DensityRegime regime);

struct SynthConfig {
  int width = 256;
  int height = 256;
  int n_heads = 20;
  DensityRegime regime = DensityRegime::Sparse;
  double head_radius_min = 6.0;
  double head_radius_max = 10.0;
  // Mixed scenes apply this on the left half and 4x on the right half.
  double min_center_spacing = 40.0;
  std::uint64_t seed = 0;

  // Regime defaults with an image sized so rejection sampling succeeds.
  static SynthConfig preset(DensityRegime regime, int n_heads, std::uint64_t seed);
};

void validate(const SynthConfig& cfg);

// Elliptical heads (axis ratio 0.7..1.3, random orientation) at centers at
// least min_center_spacing apart, made disjoint by nearest-center assignment.
// Throws PlacementFailure after 10*n_heads rejected draws.
Scene generate_scene(const SynthConfig& cfg);

std::vector<Point2D> perturb_points(std::span<const Point2D> points, double sigma, Rng& rng,
                                    int width, int height);

enum class DensityMode { Perfect, UniformMass };

DensityMode parse_density_mode(const std::string& name);

// Perfect: each gt mask holds mass 1 spread evenly over its pixels.
// UniformMass: total mass n_heads spread over the whole image.
DensityMap make_density_map(const Scene& scene, DensityMode mode);

}  // namespace crowdmask
