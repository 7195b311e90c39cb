#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "crowdmask/rle.hpp"
#include "crowdmask/types.hpp"

namespace crowdmask::io {

namespace fs = std::filesystem;

struct PointsFile {
  int width = 0;
  int height = 0;
  std::vector<Point2D> points;
};

// {"width":W,"height":H,"points":[[x,y],...]}
std::string format_points(const PointsFile& file);
PointsFile parse_points(const std::string& text);
PointsFile read_points(const fs::path& path);
void write_points(const fs::path& path, const PointsFile& file);

// JSON array of {"size":[H,W],"counts":[...]}
std::string format_masks(const std::vector<RasterMask>& masks);
std::vector<RleRecord> parse_rle_records(const std::string& text);
std::vector<RasterMask> read_masks(const fs::path& path);
void write_masks(const fs::path& path, const std::vector<RasterMask>& masks);

// Header {"width":W,"height":H} in a .json file next to a .bin file of W*H
// little-endian float32 values, row-major. Either path may be given.
DensityMap read_density(const fs::path& path);
void write_density(const fs::path& header_path, const DensityMap& map);

// Scene directory: points.json plus optional masks.json (gt masks).
Scene read_scene(const fs::path& dir);
void write_scene(const fs::path& dir, const Scene& scene);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace crowdmask::io
