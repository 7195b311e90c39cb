#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crowdmask/rle.hpp"
#include "crowdmask/rng.hpp"
#include "crowdmask/types.hpp"

namespace crowdmask {

enum class SegmenterKind { Circle, Oracle, File };

SegmenterKind parse_segmenter_kind(const std::string& name);
const char* to_string(SegmenterKind kind);

struct OracleConfig {
  // Chebyshev dilation (+) or erosion (-) drawn uniformly from [-noise, noise].
  int noise = 2;
  double p_miss = 0.05;
  // Prompts outside every gt mask bind to the nearest gt point within this
  // distance (2 * r_max by default).
  double bind_radius = 400.0;
};

struct FileConfig {
  std::vector<RleRecord> records;
  double bind_radius = 400.0;
};

// Stand-in for a promptable segmentation network. Read-only after
// construction; all randomness comes from the per-call Rng.
class Segmenter {
 public:
  virtual ~Segmenter() = default;

  virtual SegmenterKind kind() const = 0;

  // Returns nullopt when the backend produces no mask. Throws OutOfBounds
  // for prompts outside the scene.
  std::optional<RasterMask> segment(const Point2D& prompt, const Scene& scene, Rng& rng) const;

 protected:
  virtual std::optional<RasterMask> do_segment(const Point2D& prompt, const Scene& scene,
                                               Rng& rng) const = 0;
};

// Fixed-radius disc around the prompt.
class CircleSegmenter final : public Segmenter {
 public:
  explicit CircleSegmenter(double radius = 8.0) : radius_(radius) {}
  SegmenterKind kind() const override { return SegmenterKind::Circle; }

 protected:
  std::optional<RasterMask> do_segment(const Point2D& prompt, const Scene& scene,
                                       Rng& rng) const override;

 private:
  double radius_;
};

// Noisy ground-truth oracle; needs scene.gt_masks.
class OracleSegmenter final : public Segmenter {
 public:
  explicit OracleSegmenter(OracleConfig config = {});
  SegmenterKind kind() const override { return SegmenterKind::Oracle; }
  const OracleConfig& config() const { return config_; }

 protected:
  std::optional<RasterMask> do_segment(const Point2D& prompt, const Scene& scene,
                                       Rng& rng) const override;

 private:
  OracleConfig config_;
};

// Precomputed proposals, looked up by containment, then nearest centroid.
class FileSegmenter final : public Segmenter {
 public:
  explicit FileSegmenter(FileConfig config);
  SegmenterKind kind() const override { return SegmenterKind::File; }
  std::size_t size() const { return masks_.size(); }

 protected:
  std::optional<RasterMask> do_segment(const Point2D& prompt, const Scene& scene,
                                       Rng& rng) const override;

 private:
  double bind_radius_;
  std::vector<RasterMask> masks_;
  std::vector<Point2D> centroids_;
  // Pixel -> lowest index of a proposal covering it, or -1.
  std::vector<std::int32_t> label_;
  int width_ = 0;
  int height_ = 0;
};

// Square structuring element of the given radius; negative erodes.
RasterMask morph_offset(const RasterMask& mask, int offset);

Point2D mask_centroid(const RasterMask& mask);


struct SegmenterConfig {
  SegmenterKind kind = SegmenterKind::Oracle;
  OracleConfig oracle;
  FileConfig file;
  double circle_radius = 8.0;
};

std::unique_ptr<Segmenter> make_segmenter(const SegmenterConfig& config);

}  // namespace crowdmask
