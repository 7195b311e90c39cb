#include "crowdmask/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crowdmask/error.hpp"
#include "crowdmask/nnec.hpp"

namespace crowdmask {

SegmenterKind parse_segmenter_kind(const std::string& name) {
  if (name == "circle") return SegmenterKind::Circle;
  if (name == "oracle") return SegmenterKind::Oracle;
  if (name == "file") return SegmenterKind::File;
  throw Error(ErrorKind::InvalidArgument, "unknown segmenter '" + name + "'");
}

const char* to_string(SegmenterKind kind) {
  switch (kind) {
    case SegmenterKind::Circle: return "circle";
    case SegmenterKind::Oracle: return "oracle";
    case SegmenterKind::File: return "file";
  }
  return "unknown";
}

std::optional<RasterMask> Segmenter::segment(const Point2D& prompt, const Scene& scene,
                                             Rng& rng) const {
  if (!scene.in_bounds(prompt)) {
    throw Error(ErrorKind::OutOfBounds, "prompt outside the scene");
  }
  return do_segment(prompt, scene, rng);
}

std::optional<RasterMask> CircleSegmenter::do_segment(const Point2D& prompt, const Scene& scene,
                                                      Rng&) const {
  return rasterize_circle({prompt, radius_}, scene.width, scene.height);
}

RasterMask morph_offset(const RasterMask& mask, int offset) {
  if (offset == 0 || mask.empty()) return mask;
  const int w = mask.width();
  const int h = mask.height();
  const int k = std::abs(offset);
  const bool dilate = offset > 0;
  PixelBox box = mask.bounds();
  if (dilate) {
    box = PixelBox{box.col0 - k, box.row0 - k, box.col1 + k, box.row1 + k}.intersect(mask.frame());
  }

  // Separable max/min filter; pixels outside the image do not take part.
  const int bw = box.col1 - box.col0 + 1;
  const int bh = box.row1 - box.row0 + 1;
  std::vector<std::uint8_t> horiz(static_cast<std::size_t>(bw) * bh);
  for (int r = 0; r < bh; ++r) {
    for (int c = 0; c < bw; ++c) {
      const int gc = box.col0 + c;
      const int lo = std::max(gc - k, 0);
      const int hi = std::min(gc + k, w - 1);
      std::uint8_t acc = dilate ? 0 : 1;
      for (int x = lo; x <= hi; ++x) {
        const bool v = mask.get(x, box.row0 + r);
        if (dilate ? v : !v) {
          acc = dilate ? 1 : 0;
          break;
        }
      }
      horiz[static_cast<std::size_t>(r) * bw + c] = acc;
    }
  }
  RasterMask out(w, h);
  for (int r = 0; r < bh; ++r) {
    const int gr = box.row0 + r;
    const int lo = std::max(gr - k, 0);
    const int hi = std::min(gr + k, h - 1);
    for (int c = 0; c < bw; ++c) {
      bool acc = !dilate;
      for (int y = lo; y <= hi; ++y) {
        // Rows outside the box hold no set pixels after the horizontal pass
        // (dilation) or are background (erosion).
        bool v = false;
        if (y >= box.row0 && y <= box.row1) {
          v = horiz[static_cast<std::size_t>(y - box.row0) * bw + c] != 0;
        }
        if (dilate ? v : !v) {
          acc = dilate;
          break;
        }
      }
      if (acc) out.set(box.col0 + c, gr, true);
    }
  }
  return out;
}

Point2D mask_centroid(const RasterMask& mask) {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  const PixelBox box = mask.bounds();
  for (int r = box.row0; r <= box.row1; ++r) {
    for (int c = box.col0; c <= box.col1; ++c) {
      if (!mask.get(c, r)) continue;
      sx += c + 0.5;
      sy += r + 0.5;
      ++n;
    }
  }
  if (n == 0) return {std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN()};
  return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

OracleSegmenter::OracleSegmenter(OracleConfig config) : config_(config) {
  if (config_.noise < 0) throw Error(ErrorKind::InvalidArgument, "oracle noise must be >= 0");
  if (!(config_.p_miss >= 0.0 && config_.p_miss <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "oracle p_miss must lie in [0,1]");
  }
}

std::optional<RasterMask> OracleSegmenter::do_segment(const Point2D& prompt, const Scene& scene,
                                                      Rng& rng) const {
  if (!scene.gt_masks) {
    throw Error(ErrorKind::MissingGroundTruth, "oracle segmenter needs gt masks");
  }
  // Both draws happen on every call so the stream layout is fixed.
  const bool miss = rng.next_uniform() < config_.p_miss;
  const int offset = rng.next_int(-config_.noise, config_.noise);
  if (miss) return std::nullopt;

  const auto& masks = *scene.gt_masks;
  std::optional<std::size_t> hit;
  for (std::size_t k = 0; k < masks.size(); ++k) {
    if (masks[k].contains(prompt)) {
      hit = k;
      break;
    }
  }
  if (!hit) {
    double best = config_.bind_radius * config_.bind_radius;
    for (std::size_t k = 0; k < scene.points.size(); ++k) {
      const double d2 = squared_distance(prompt, scene.points[k]);
      if (d2 <= best && (!hit || d2 < best)) {
        best = d2;
        hit = k;
      }
    }
  }
  if (!hit) return std::nullopt;
  RasterMask out = morph_offset(masks[*hit], offset);
  if (out.empty()) return std::nullopt;
  return out;
}

FileSegmenter::FileSegmenter(FileConfig config) : bind_radius_(config.bind_radius) {
  for (const auto& rec : config.records) {
    masks_.push_back(rle_decode(rec));
    if (masks_.size() > 1 && !masks_.back().same_shape(masks_.front())) {
      throw Error(ErrorKind::SizeMismatch, "proposal records differ in size");
    }
  }
  if (masks_.empty()) return;
  width_ = masks_.front().width();
  height_ = masks_.front().height();
  label_.assign(static_cast<std::size_t>(width_) * height_, -1);
  for (std::size_t k = masks_.size(); k-- > 0;) {
    const auto bits = masks_[k].bits();
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) label_[i] = static_cast<std::int32_t>(k);
    }
    centroids_.push_back(mask_centroid(masks_[k]));
  }
  std::reverse(centroids_.begin(), centroids_.end());
}

std::optional<RasterMask> FileSegmenter::do_segment(const Point2D& prompt, const Scene& scene,
                                                    Rng&) const {
  if (masks_.empty()) return std::nullopt;
  if (scene.width != width_ || scene.height != height_) {
    throw Error(ErrorKind::SizeMismatch, "proposal records do not match the scene size");
  }
  const auto col = static_cast<std::size_t>(prompt.x);
  const auto row = static_cast<std::size_t>(prompt.y);
  const std::int32_t k = label_[row * static_cast<std::size_t>(width_) + col];
  if (k >= 0) return masks_[static_cast<std::size_t>(k)];

  std::optional<std::size_t> hit;
  double best = bind_radius_ * bind_radius_;
  for (std::size_t j = 0; j < centroids_.size(); ++j) {
    if (masks_[j].empty()) continue;
    const double d2 = squared_distance(prompt, centroids_[j]);
    if (d2 <= best && (!hit || d2 < best)) {
      best = d2;
      hit = j;
    }
  }
  if (!hit) return std::nullopt;
  return masks_[*hit];
}


std::unique_ptr<Segmenter> make_segmenter(const SegmenterConfig& config) {
  switch (config.kind) {
    case SegmenterKind::Circle: return std::make_unique<CircleSegmenter>(config.circle_radius);
    case SegmenterKind::Oracle: return std::make_unique<OracleSegmenter>(config.oracle);
    case SegmenterKind::File: return std::make_unique<FileSegmenter>(config.file);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown segmenter kind");
}

}  // namespace crowdmask
