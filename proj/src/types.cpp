#include "crowdmask/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdmask/error.hpp"

namespace crowdmask {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyPointSet: return "EmptyPointSet";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::NoPredictions: return "NoPredictions";
    case ErrorKind::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorKind::PlacementFailure: return "PlacementFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

PixelBox PixelBox::intersect(const PixelBox& o) const {
  return {std::max(col0, o.col0), std::max(row0, o.row0), std::min(col1, o.col1),
          std::min(row1, o.row1)};
}

PixelBox PixelBox::unite(const PixelBox& o) const {
  if (empty()) return o;
  if (o.empty()) return *this;
  return {std::min(col0, o.col0), std::min(row0, o.row0), std::max(col1, o.col1),
          std::max(row1, o.row1)};
}

RasterMask::RasterMask(int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::InvalidArgument, "mask dimensions must be positive");
  }
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

RasterMask::RasterMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::InvalidArgument, "mask dimensions must be positive");
  }
  if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::SizeMismatch, "bit count does not match width*height");
  }
  for (auto& b : bits_) {
    b = b ? 1 : 0;
    population_ += b;
  }
  box_ = frame();
  box_tight_ = false;
  box_ = bounds();
  box_tight_ = true;
}

void RasterMask::set(int col, int row, bool value) { set(index(col, row), value); }

void RasterMask::set(std::size_t i, bool value) {
  const std::uint8_t v = value ? 1 : 0;
  if (bits_[i] == v) return;
  bits_[i] = v;
  const int c = static_cast<int>(i % static_cast<std::size_t>(width_));
  const int r = static_cast<int>(i / static_cast<std::size_t>(width_));
  if (v) {
    ++population_;
    box_ = box_.unite({c, r, c, r});
  } else if (--population_ == 0) {
    box_ = {};
    box_tight_ = true;
  } else if (c == box_.col0 || c == box_.col1 || r == box_.row0 || r == box_.row1) {
    box_tight_ = false;
  }
}

bool RasterMask::contains(const Point2D& p) const {
  if (!(p.x >= 0.0 && p.y >= 0.0)) return false;
  const double fc = std::floor(p.x);
  const double fr = std::floor(p.y);
  if (fc >= width_ || fr >= height_) return false;
  return get(static_cast<int>(fc), static_cast<int>(fr));
}

PixelBox RasterMask::bounds() const {
  if (box_tight_ || population_ == 0) return population_ == 0 ? PixelBox{} : box_;
  // Shrink the loose box; only its interior can hold set pixels.
  PixelBox box{width_, height_, -1, -1};
  const int span = box_.col1 - box_.col0 + 1;
  for (int r = box_.row0; r <= box_.row1; ++r) {
    const std::uint8_t* row = bits_.data() + index(box_.col0, r);
    const std::uint8_t* first = std::find(row, row + span, std::uint8_t{1});
    if (first == row + span) continue;
    const int c_first = box_.col0 + static_cast<int>(first - row);
    int c_last = box_.col1;
    while (!bits_[index(c_last, r)]) --c_last;
    box.col0 = std::min(box.col0, c_first);
    box.col1 = std::max(box.col1, c_last);
    box.row0 = std::min(box.row0, r);
    box.row1 = r;
  }
  return box;
}

std::size_t intersection_count(const RasterMask& a, const PixelBox& box_a,
                               const RasterMask& b, const PixelBox& box_b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::SizeMismatch, "masks differ in size");
  }
  const PixelBox box = box_a.intersect(box_b);
  if (box.empty()) return 0;
  const auto abits = a.bits();
  const auto bbits = b.bits();
  const auto w = static_cast<std::size_t>(a.width());
  std::size_t count = 0;
  for (int r = box.row0; r <= box.row1; ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * w;
    for (int c = box.col0; c <= box.col1; ++c) {
      count += abits[base + c] & bbits[base + c];
    }
  }
  return count;
}

std::size_t intersection_count(const RasterMask& a, const RasterMask& b) {
  return intersection_count(a, a.frame(), b, b.frame());
}

RasterMask intersect(const RasterMask& a, const RasterMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::SizeMismatch, "masks differ in size");
  }
  std::vector<std::uint8_t> bits(a.size());
  const auto abits = a.bits();
  const auto bbits = b.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = abits[i] & bbits[i];
  return RasterMask(a.width(), a.height(), std::move(bits));
}

void validate(const Scene& scene) {
  if (scene.width <= 0 || scene.height <= 0) {
    throw Error(ErrorKind::InvalidArgument, "scene dimensions must be positive");
  }
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    if (!scene.in_bounds(scene.points[i])) {
      throw Error(ErrorKind::OutOfBounds, "point " + std::to_string(i) + " outside the image");
    }
  }
  if (!scene.gt_masks) return;
  const auto& masks = *scene.gt_masks;
  if (masks.size() != scene.points.size()) {
    throw Error(ErrorKind::LengthMismatch, "gt_masks and points differ in length");
  }
  std::vector<std::uint8_t> claimed(static_cast<std::size_t>(scene.width) * scene.height, 0);
  for (std::size_t k = 0; k < masks.size(); ++k) {
    const auto& m = masks[k];
    if (m.width() != scene.width || m.height() != scene.height) {
      throw Error(ErrorKind::SizeMismatch, "gt mask " + std::to_string(k) + " has wrong size");
    }
    const auto bits = m.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (!bits[i]) continue;
      if (claimed[i]) {
        throw Error(ErrorKind::InvalidArgument, "gt masks overlap");
      }
      claimed[i] = 1;
    }
  }
}

void validate(const DensityMap& map) {
  if (map.width <= 0 || map.height <= 0) {
    throw Error(ErrorKind::InvalidArgument, "density map dimensions must be positive");
  }
  if (map.values.size() != static_cast<std::size_t>(map.width) * map.height) {
    throw Error(ErrorKind::SizeMismatch, "density value count does not match width*height");
  }
  for (float v : map.values) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw Error(ErrorKind::InvalidArgument, "density values must be finite and non-negative");
    }
  }
}

Point2D clamp_to_image(const Point2D& p, int width, int height) {
  const double xmax = std::nextafter(static_cast<double>(width), 0.0);
  const double ymax = std::nextafter(static_cast<double>(height), 0.0);
  return {std::clamp(p.x, 0.0, xmax), std::clamp(p.y, 0.0, ymax)};
}

}  // namespace crowdmask
