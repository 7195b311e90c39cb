#include "crowdmask/nnec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "crowdmask/error.hpp"

namespace crowdmask {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this size the pairwise scan beats building the grid.
constexpr std::size_t kGridThreshold = 64;

// Points bucketed into square cells, stored CSR-style.
class BucketGrid {
 public:
  explicit BucketGrid(std::span<const Point2D> points) : points_(points) {
    double min_x = kInf, min_y = kInf, max_x = -kInf, max_y = -kInf;
    for (const auto& p : points) {
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    origin_ = {min_x, min_y};
    const double w = max_x - min_x;
    const double h = max_y - min_y;
    const double area = std::max(w * h, 1.0);
    cell_ = std::max(std::sqrt(area / static_cast<double>(points.size())) * 1.5, 1e-6);
    cols_ = std::max(1, static_cast<int>(std::min(w / cell_, 1e6)) + 1);
    rows_ = std::max(1, static_cast<int>(std::min(h / cell_, 1e6)) + 1);

    std::vector<std::uint32_t> cell_of(points.size());
    offsets_.assign(static_cast<std::size_t>(cols_) * rows_ + 1, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [c, r] = cell_coords(points[i]);
      cell_of[i] = static_cast<std::uint32_t>(r * cols_ + c);
      ++offsets_[cell_of[i] + 1];
    }
    for (std::size_t k = 1; k < offsets_.size(); ++k) offsets_[k] += offsets_[k - 1];
    members_.resize(points.size());
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) {
      members_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
    }
  }

  // Squared distance from points[i] to its nearest other point.
  double nearest_sq(std::size_t i) const {
    const Point2D& q = points_[i];
    const auto [qc, qr] = cell_coords(q);
    double best = kInf;
    const int max_ring = std::max(cols_, rows_);
    for (int k = 0; k <= max_ring; ++k) {
      const int c0 = qc - k, c1 = qc + k, r0 = qr - k, r1 = qr + k;
      for (int r = std::max(r0, 0); r <= std::min(r1, rows_ - 1); ++r) {
        const bool edge_row = (r == r0 || r == r1);
        for (int c = std::max(c0, 0); c <= std::min(c1, cols_ - 1); ++c) {
          if (!edge_row && c != c0 && c != c1) continue;
          const std::size_t cell = static_cast<std::size_t>(r) * cols_ + c;
          for (std::uint32_t m = offsets_[cell]; m < offsets_[cell + 1]; ++m) {
            const std::uint32_t j = members_[m];
            if (j == i) continue;
            best = std::min(best, squared_distance(q, points_[j]));
          }
        }
      }
      // Anything outside rings 0..k is at least (k-1)*cell away, keeping one
      // cell of slack for rounding in the cell assignment.
      const double reach = static_cast<double>(k - 1) * cell_;
      if (k >= 1 && best <= reach * reach) break;
    }
    return best;
  }

 private:
  std::pair<int, int> cell_coords(const Point2D& p) const {
    const int c = std::clamp(static_cast<int>(std::floor((p.x - origin_.x) / cell_)), 0, cols_ - 1);
    const int r = std::clamp(static_cast<int>(std::floor((p.y - origin_.y) / cell_)), 0, rows_ - 1);
    return {c, r};
  }

  std::span<const Point2D> points_;
  Point2D origin_;
  double cell_ = 1.0;
  int cols_ = 1;
  int rows_ = 1;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> members_;
};

double brute_nearest_sq(std::span<const Point2D> points, std::size_t i) {
  double best = kInf;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (j == i) continue;
    best = std::min(best, squared_distance(points[i], points[j]));
  }
  return best;
}

}  // namespace

void validate(const NnecParams& params) {
  if (!(params.r_min > 0.0) || !(params.r_min <= params.r_max) || !std::isfinite(params.r_max)) {
    throw Error(ErrorKind::InvalidArgument, "NNEC radii must satisfy 0 < r_min <= r_max");
  }
  if (!(params.delta >= 0.0) || !std::isfinite(params.delta)) {
    throw Error(ErrorKind::InvalidArgument, "NNEC delta must be >= 0");
  }
}

double nnec_radius_from_distance(double nearest_distance, const NnecParams& params) {
  if (std::isinf(nearest_distance)) return params.r_max;
  const double base = params.bounded ? nearest_distance / 2.0 - params.delta
                                     : nearest_distance - params.delta;
  return std::clamp(base, params.r_min, params.r_max);
}

ExclusionCircle nnec_radius(std::span<const Point2D> points, std::size_t i,
                            const NnecParams& params) {
  validate(params);
  if (points.empty()) throw Error(ErrorKind::EmptyPointSet, "no points");
  if (i >= points.size()) throw Error(ErrorKind::InvalidArgument, "point index out of range");
  const double d = std::sqrt(brute_nearest_sq(points, i));
  return {points[i], nnec_radius_from_distance(d, params)};
}

std::vector<double> nearest_neighbor_sq(std::span<const Point2D> points) {
  std::vector<double> out(points.size(), kInf);
  if (points.size() < 2) return out;
  const auto n = static_cast<std::int64_t>(points.size());
  if (points.size() <= kGridThreshold) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = brute_nearest_sq(points, i);
    return out;
  }
  const BucketGrid grid(points);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = grid.nearest_sq(static_cast<std::size_t>(i));
  return out;
}

std::vector<ExclusionCircle> all_radii(std::span<const Point2D> points,
                                       const NnecParams& params) {
  validate(params);
  if (points.empty()) throw Error(ErrorKind::EmptyPointSet, "no points");
  const std::vector<double> nn = nearest_neighbor_sq(points);
  std::vector<ExclusionCircle> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = {points[i], nnec_radius_from_distance(std::sqrt(nn[i]), params)};
  }
  return out;
}

std::vector<ExclusionCircle> all_radii_reference(std::span<const Point2D> points,
                                                 const NnecParams& params) {
  validate(params);
  if (points.empty()) throw Error(ErrorKind::EmptyPointSet, "no points");
  std::vector<ExclusionCircle> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.push_back({points[i], nnec_radius_from_distance(std::sqrt(brute_nearest_sq(points, i)),
                                                        params)});
  }
  return out;
}

PixelBox circle_box(const ExclusionCircle& circle, int width, int height) {
  const double r = circle.radius;
  if (!(r >= 0.0) || !std::isfinite(circle.center.x) || !std::isfinite(circle.center.y)) {
    return {};
  }
  const double c0 = std::floor(circle.center.x - r - 0.5);
  const double c1 = std::ceil(circle.center.x + r - 0.5);
  const double r0 = std::floor(circle.center.y - r - 0.5);
  const double r1 = std::ceil(circle.center.y + r - 0.5);
  const PixelBox frame{0, 0, width - 1, height - 1};
  if (c1 < 0 || r1 < 0 || c0 > width - 1 || r0 > height - 1) return {};
  return PixelBox{static_cast<int>(std::max(c0, 0.0)), static_cast<int>(std::max(r0, 0.0)),
                  static_cast<int>(std::min(c1, width - 1.0)),
                  static_cast<int>(std::min(r1, height - 1.0))}
      .intersect(frame);
}

RasterMask rasterize_circle(const ExclusionCircle& circle, int width, int height) {
  RasterMask mask(width, height);
  const PixelBox box = circle_box(circle, width, height);
  if (box.empty()) return mask;
  const double r2 = circle.radius * circle.radius;
  for (int r = box.row0; r <= box.row1; ++r) {
    const double dy = r + 0.5 - circle.center.y;
    for (int c = box.col0; c <= box.col1; ++c) {
      const double dx = c + 0.5 - circle.center.x;
      if (dx * dx + dy * dy <= r2) mask.set(c, r, true);
    }
  }
  return mask;
}

ConstrainResult constrain(const RasterMask* proposal, const ExclusionCircle& circle, int width,
                          int height) {
  if (proposal && (proposal->width() != width || proposal->height() != height)) {
    throw Error(ErrorKind::SizeMismatch, "proposal does not match the image size");
  }
  RasterMask disc = rasterize_circle(circle, width, height);
  if (proposal && !proposal->empty()) {
    RasterMask clipped(width, height);
    const PixelBox box = circle_box(circle, width, height);
    for (int r = box.row0; r <= box.row1; ++r) {
      for (int c = box.col0; c <= box.col1; ++c) {
        if (disc.get(c, r) && proposal->get(c, r)) clipped.set(c, r, true);
      }
    }
    if (!clipped.empty()) return {std::move(clipped), false};
  }
  return {std::move(disc), true};
}

std::vector<RasterMask> resolve_overlaps(std::span<const RasterMask> masks,
                                         std::span<const Point2D> centers) {
  if (masks.size() != centers.size()) {
    throw Error(ErrorKind::LengthMismatch, "masks and centers differ in length");
  }
  if (masks.empty()) return {};
  const int w = masks.front().width();
  const int h = masks.front().height();
  for (const auto& m : masks) {
    if (m.width() != w || m.height() != h) {
      throw Error(ErrorKind::SizeMismatch, "masks differ in size");
    }
  }

  std::vector<PixelBox> boxes(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) boxes[i] = masks[i].bounds();

  const auto pixel_sq = [&](int c, int r, std::size_t k) {
    const double dx = c + 0.5 - centers[k].x;
    const double dy = r + 0.5 - centers[k].y;
    return dx * dx + dy * dy;
  };

  // Ascending index plus strict comparison gives lowest-index ties.
  std::vector<std::int32_t> owner(static_cast<std::size_t>(w) * h, -1);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const PixelBox& b = boxes[i];
    for (int r = b.row0; r <= b.row1; ++r) {
      for (int c = b.col0; c <= b.col1; ++c) {
        if (!masks[i].get(c, r)) continue;
        std::int32_t& o = owner[static_cast<std::size_t>(r) * w + c];
        if (o < 0 || pixel_sq(c, r, i) < pixel_sq(c, r, static_cast<std::size_t>(o))) {
          o = static_cast<std::int32_t>(i);
        }
      }
    }
  }

  std::vector<RasterMask> out;
  out.reserve(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    RasterMask m(w, h);
    const PixelBox& b = boxes[i];
    for (int r = b.row0; r <= b.row1; ++r) {
      for (int c = b.col0; c <= b.col1; ++c) {
        if (owner[static_cast<std::size_t>(r) * w + c] == static_cast<std::int32_t>(i)) {
          m.set(c, r, true);
        }
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace crowdmask
