#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crowdmask {

// Continuous image coordinate in pixels. Pixel (col,row) covers
// [col,col+1) x [row,row+1), so its center is (col+0.5, row+0.5).
struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline double squared_distance(const Point2D& a, const Point2D& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Point2D& a, const Point2D& b) {
  return std::sqrt(squared_distance(a, b));
}

// Inclusive pixel rectangle.
struct PixelBox {
  int col0 = 0;
  int row0 = 0;
  int col1 = -1;
  int row1 = -1;

  bool empty() const { return col1 < col0 || row1 < row0; }
  PixelBox intersect(const PixelBox& o) const;
  PixelBox unite(const PixelBox& o) const;

  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

// Binary mask, row-major, origin top-left; pixel (col,row) lives at
// row*width + col. The population and a bounding box are kept in sync by
// set(); the box may be loose after pixels are cleared.
class RasterMask {
 public:
  RasterMask() = default;
  RasterMask(int width, int height);
  RasterMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }
  std::size_t population() const { return population_; }
  bool empty() const { return population_ == 0; }

  bool get(int col, int row) const { return bits_[index(col, row)] != 0; }
  bool get(std::size_t i) const { return bits_[i] != 0; }
  void set(int col, int row, bool value);
  void set(std::size_t i, bool value);

  // True if the pixel containing p is set; false outside the image.
  bool contains(const Point2D& p) const;

  std::span<const std::uint8_t> bits() const { return bits_; }

  // Tightest box around set pixels; empty box for an empty mask.
  PixelBox bounds() const;
  PixelBox frame() const { return {0, 0, width_ - 1, height_ - 1}; }

  bool same_shape(const RasterMask& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const RasterMask& a, const RasterMask& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
  std::size_t population_ = 0;
  PixelBox box_;
  bool box_tight_ = true;
};

// |a & b|, restricted to the overlap of both bounding boxes when given.
std::size_t intersection_count(const RasterMask& a, const RasterMask& b);
std::size_t intersection_count(const RasterMask& a, const PixelBox& box_a,
                               const RasterMask& b, const PixelBox& box_b);
RasterMask intersect(const RasterMask& a, const RasterMask& b);

struct ExclusionCircle {
  Point2D center;
  double radius = 0.0;

  friend bool operator==(const ExclusionCircle&, const ExclusionCircle&) = default;
};

struct Scene {
  int width = 0;
  int height = 0;
  std::vector<Point2D> points;
  std::optional<std::vector<RasterMask>> gt_masks;
  std::string image_id;

  bool in_bounds(const Point2D& p) const {
    return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.y >= 0.0 &&
           p.x < width && p.y < height;
  }
};

// Throws on out-of-bounds points, misaligned or overlapping gt masks.
void validate(const Scene& scene);

struct DensityMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  DensityMap() = default;
  DensityMap(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0f) {}
};

void validate(const DensityMap& map);

// Clamp p into [0,width) x [0,height).
Point2D clamp_to_image(const Point2D& p, int width, int height);

}  // namespace crowdmask
