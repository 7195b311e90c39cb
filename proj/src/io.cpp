#include "crowdmask/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crowdmask/error.hpp"

namespace crowdmask::io {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::string format_points(const PointsFile& file) {
  json pts = json::array();
  for (const auto& p : file.points) pts.push_back({p.x, p.y});
  json j = {{"width", file.width}, {"height", file.height}, {"points", std::move(pts)}};
  return j.dump() + "\n";
}

PointsFile parse_points(const std::string& text) {
  const json j = parse_json(text, "points file");
  PointsFile file;
  file.width = field<int>(j, "width");
  file.height = field<int>(j, "height");
  if (file.width <= 0 || file.height <= 0) {
    throw Error(ErrorKind::ParseError, "points file dimensions must be positive");
  }
  for (const auto& p : field<json>(j, "points")) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorKind::ParseError, "each point must be [x,y]");
    }
    file.points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return file;
}

PointsFile read_points(const fs::path& path) { return parse_points(read_text(path)); }

void write_points(const fs::path& path, const PointsFile& file) {
  write_text(path, format_points(file));
}

std::string format_masks(const std::vector<RasterMask>& masks) {
  json arr = json::array();
  for (const auto& m : masks) {
    const RleRecord rec = rle_encode(m);
    arr.push_back({{"size", {rec.height, rec.width}}, {"counts", rec.counts}});
  }
  return arr.dump() + "\n";
}

std::vector<RleRecord> parse_rle_records(const std::string& text) {
  const json j = parse_json(text, "masks file");
  if (!j.is_array()) throw Error(ErrorKind::ParseError, "masks file must be a JSON array");
  std::vector<RleRecord> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    const auto size = field<std::vector<int>>(item, "size");
    if (size.size() != 2) throw Error(ErrorKind::ParseError, "size must be [H,W]");
    out.push_back({size[0], size[1], field<std::vector<std::uint32_t>>(item, "counts")});
  }
  return out;
}

std::vector<RasterMask> read_masks(const fs::path& path) {
  std::vector<RasterMask> masks;
  for (const auto& rec : parse_rle_records(read_text(path))) masks.push_back(rle_decode(rec));
  return masks;
}

void write_masks(const fs::path& path, const std::vector<RasterMask>& masks) {
  write_text(path, format_masks(masks));
}

DensityMap read_density(const fs::path& path) {
  fs::path header = path;
  fs::path data = path;
  if (path.extension() == ".bin") {
    header.replace_extension(".json");
  } else {
    data.replace_extension(".bin");
  }
  const json j = parse_json(read_text(header), "density header");
  DensityMap map(field<int>(j, "width"), field<int>(j, "height"));
  const std::string raw = read_text(data);
  if (raw.size() != map.values.size() * 4) {
    throw Error(ErrorKind::SizeMismatch, "density data has " + std::to_string(raw.size()) +
                                             " bytes, expected " +
                                             std::to_string(map.values.size() * 4));
  }
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    std::uint32_t u = 0;
    for (int b = 3; b >= 0; --b) u = (u << 8) | static_cast<unsigned char>(raw[i * 4 + b]);
    map.values[i] = std::bit_cast<float>(u);
  }
  validate(map);
  return map;
}

void write_density(const fs::path& header_path, const DensityMap& map) {
  fs::path header = header_path;
  if (header.extension() == ".bin") header.replace_extension(".json");
  fs::path data = header;
  data.replace_extension(".bin");
  json j = {{"width", map.width}, {"height", map.height}};
  write_text(header, j.dump() + "\n");
  std::string raw(map.values.size() * 4, '\0');
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const auto u = std::bit_cast<std::uint32_t>(map.values[i]);
    for (int b = 0; b < 4; ++b) raw[i * 4 + b] = static_cast<char>((u >> (8 * b)) & 0xFF);
  }
  write_text(data, raw);
}

Scene read_scene(const fs::path& dir) {
  const PointsFile pts = read_points(dir / "points.json");
  Scene scene;
  scene.width = pts.width;
  scene.height = pts.height;
  scene.points = pts.points;
  scene.image_id = dir.filename().string();
  if (scene.image_id.empty()) scene.image_id = dir.parent_path().filename().string();
  if (fs::exists(dir / "masks.json")) scene.gt_masks = read_masks(dir / "masks.json");
  validate(scene);
  return scene;
}

void write_scene(const fs::path& dir, const Scene& scene) {
  fs::create_directories(dir);
  write_points(dir / "points.json", {scene.width, scene.height, scene.points});
  if (scene.gt_masks) write_masks(dir / "masks.json", *scene.gt_masks);
}

}  // namespace crowdmask::io
