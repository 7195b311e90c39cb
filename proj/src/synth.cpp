#include "crowdmask/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crowdmask/error.hpp"
#include "crowdmask/nnec.hpp"

namespace crowdmask {

namespace {

constexpr double kMaxAxisRatio = 1.3;
constexpr double kMinAxisRatio = 0.7;

double spacing_at(const SynthConfig& cfg, const Point2D& p) {
  if (cfg.regime != DensityRegime::Mixed) return cfg.min_center_spacing;
  return p.x < cfg.width / 2.0 ? cfg.min_center_spacing : 4.0 * cfg.min_center_spacing;
}

struct Ellipse {
  Point2D center;
  double semi_a;
  double semi_b;
  double cos_t;
  double sin_t;

  bool covers(int c, int r) const {
    const double dx = c + 0.5 - center.x;
    const double dy = r + 0.5 - center.y;
    const double u = (dx * cos_t + dy * sin_t) / semi_a;
    const double v = (-dx * sin_t + dy * cos_t) / semi_b;
    return u * u + v * v <= 1.0;
  }
};

}  // namespace

DensityRegime parse_regime(const std::string& name) {
  if (name == "sparse") return DensityRegime::Sparse;
  if (name == "dense") return DensityRegime::Dense;
  if (name == "mixed") return DensityRegime::Mixed;
  throw Error(ErrorKind::InvalidArgument, "unknown regime '" + name + "'");
}

const char* to_string(DensityRegime regime) {
  switch (regime) {
    case DensityRegime::Sparse: return "sparse";
    case DensityRegime::Dense: return "dense";
    case DensityRegime::Mixed: return "mixed";
  }
  return "unknown";
}

SynthConfig SynthConfig::preset(DensityRegime regime, int n_heads, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.regime = regime;
  cfg.n_heads = n_heads;
  cfg.seed = seed;
  // Area per head: 4 * spacing^2 (mixed: the mean of both halves).
  double area_per_head = 0.0;
  switch (regime) {
    case DensityRegime::Sparse:
      cfg.head_radius_min = 6.0;
      cfg.head_radius_max = 10.0;
      cfg.min_center_spacing = 40.0;
      area_per_head = 4.0 * 40.0 * 40.0;
      break;
    case DensityRegime::Dense:
      cfg.head_radius_min = 4.0;
      cfg.head_radius_max = 7.0;
      cfg.min_center_spacing = 5.0;
      area_per_head = 4.0 * 5.0 * 5.0;
      break;
    case DensityRegime::Mixed:
      cfg.head_radius_min = 4.0;
      cfg.head_radius_max = 8.0;
      cfg.min_center_spacing = 6.0;
      area_per_head = 2.0 * (6.0 * 6.0 + 24.0 * 24.0) * 2.0;
      break;
  }
  const double margin = 2.0 * kMaxAxisRatio * cfg.head_radius_max;
  const int side = static_cast<int>(std::ceil(std::sqrt(std::max(n_heads, 1) * area_per_head) +
                                              2.0 * margin));
  cfg.width = std::max(side, 32);
  cfg.height = cfg.width;
  return cfg;
}

void validate(const SynthConfig& cfg) {
  if (cfg.width <= 0 || cfg.height <= 0) {
    throw Error(ErrorKind::InvalidArgument, "synth image size must be positive");
  }
  if (cfg.n_heads < 0) throw Error(ErrorKind::InvalidArgument, "n_heads must be >= 0");
  if (!(cfg.head_radius_min >= 1.5 && cfg.head_radius_min <= cfg.head_radius_max)) {
    throw Error(ErrorKind::InvalidArgument, "head radius range must satisfy 1.5 <= min <= max");
  }
  if (!(cfg.min_center_spacing >= 2.0)) {
    throw Error(ErrorKind::InvalidArgument, "min_center_spacing must be >= 2");
  }
}

Scene generate_scene(const SynthConfig& cfg) {
  validate(cfg);
  Rng rng = derive_rng(cfg.seed, "synth/scene");
  Scene scene;
  scene.width = cfg.width;
  scene.height = cfg.height;
  scene.image_id = "synth-" + std::to_string(cfg.seed);

  // Keep whole heads inside the image when there is room for it.
  const double reach = kMaxAxisRatio * cfg.head_radius_max;
  const double mx = cfg.width > 4.0 * reach ? reach : 0.0;
  const double my = cfg.height > 4.0 * reach ? reach : 0.0;

  const int max_attempts = 10 * cfg.n_heads;
  int attempts = 0;
  while (static_cast<int>(scene.points.size()) < cfg.n_heads) {
    if (attempts++ >= max_attempts) {
      throw Error(ErrorKind::PlacementFailure,
                  "placed " + std::to_string(scene.points.size()) + " of " +
                      std::to_string(cfg.n_heads) + " heads in " + std::to_string(max_attempts) +
                      " attempts");
    }
    const double x = mx + rng.next_uniform() * (cfg.width - 2.0 * mx);
    const double y = my + rng.next_uniform() * (cfg.height - 2.0 * my);
    const Point2D p = clamp_to_image({x, y}, cfg.width, cfg.height);
    const double sp = spacing_at(cfg, p);
    const bool ok = std::all_of(scene.points.begin(), scene.points.end(), [&](const Point2D& q) {
      const double s = std::max(sp, spacing_at(cfg, q));
      return squared_distance(p, q) >= s * s;
    });
    if (ok) scene.points.push_back(p);
  }

  std::vector<Ellipse> heads;
  std::vector<PixelBox> boxes;
  heads.reserve(scene.points.size());
  for (const auto& p : scene.points) {
    const double a = cfg.head_radius_min +
                     rng.next_uniform() * (cfg.head_radius_max - cfg.head_radius_min);
    const double ratio = kMinAxisRatio + rng.next_uniform() * (kMaxAxisRatio - kMinAxisRatio);
    const double theta = rng.next_uniform() * std::numbers::pi;
    heads.push_back({p, a, a * ratio, std::cos(theta), std::sin(theta)});
    boxes.push_back(circle_box({p, std::max(a, a * ratio)}, cfg.width, cfg.height));
  }

  // Overlaps go to the nearest center, ties to the lower index, the same
  // rule resolve_overlaps applies, without materializing each ellipse.
  const auto w = static_cast<std::size_t>(cfg.width);
  std::vector<std::int32_t> owner(w * static_cast<std::size_t>(cfg.height), -1);
  const auto sq = [&](int c, int r, std::size_t k) {
    return squared_distance({c + 0.5, r + 0.5}, scene.points[k]);
  };
  for (std::size_t i = 0; i < heads.size(); ++i) {
    for (int r = boxes[i].row0; r <= boxes[i].row1; ++r) {
      for (int c = boxes[i].col0; c <= boxes[i].col1; ++c) {
        if (!heads[i].covers(c, r)) continue;
        std::int32_t& o = owner[static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c)];
        if (o < 0 || sq(c, r, i) < sq(c, r, static_cast<std::size_t>(o))) {
          o = static_cast<std::int32_t>(i);
        }
      }
    }
  }
  std::vector<RasterMask> masks;
  masks.reserve(heads.size());
  for (std::size_t i = 0; i < heads.size(); ++i) {
    RasterMask m(cfg.width, cfg.height);
    for (int r = boxes[i].row0; r <= boxes[i].row1; ++r) {
      for (int c = boxes[i].col0; c <= boxes[i].col1; ++c) {
        if (owner[static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c)] ==
            static_cast<std::int32_t>(i)) {
          m.set(c, r, true);
        }
      }
    }
    masks.push_back(std::move(m));
  }
  scene.gt_masks = std::move(masks);
  return scene;
}

std::vector<Point2D> perturb_points(std::span<const Point2D> points, double sigma, Rng& rng,
                                    int width, int height) {
  if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must be >= 0");
  std::vector<Point2D> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const double x = rng.next_gaussian(p.x, sigma);
    const double y = rng.next_gaussian(p.y, sigma);
    out.push_back(clamp_to_image({x, y}, width, height));
  }
  return out;
}

DensityMode parse_density_mode(const std::string& name) {
  if (name == "perfect") return DensityMode::Perfect;
  if (name == "uniform_mass" || name == "uniform-mass") return DensityMode::UniformMass;
  throw Error(ErrorKind::InvalidArgument, "unknown density mode '" + name + "'");
}

DensityMap make_density_map(const Scene& scene, DensityMode mode) {
  if (!scene.gt_masks) throw Error(ErrorKind::MissingGroundTruth, "density map needs gt masks");
  DensityMap map(scene.width, scene.height);
  if (mode == DensityMode::UniformMass) {
    const auto v = static_cast<float>(static_cast<double>(scene.gt_masks->size()) /
                                      static_cast<double>(map.values.size()));
    std::fill(map.values.begin(), map.values.end(), v);
    return map;
  }
  for (const auto& m : *scene.gt_masks) {
    if (m.empty()) continue;
    const auto v = static_cast<float>(1.0 / static_cast<double>(m.population()));
    const auto bits = m.bits();
    for (std::size_t p = 0; p < bits.size(); ++p) {
      if (bits[p]) map.values[p] = v;
    }
  }
  return map;
}

}  // namespace crowdmask
