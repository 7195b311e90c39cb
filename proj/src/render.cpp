#include "crowdmask/render.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

#include "crowdmask/error.hpp"

namespace crowdmask {

namespace {

constexpr Rgb kBackground{24, 24, 24};
constexpr Rgb kPoint{255, 255, 255};

// Hue stepped by the golden ratio; saturation and value alternate over
// three levels so neighbouring indices stay apart.
Rgb hsv(double h, double s, double v) {
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  const auto to8 = [&](double t) { return static_cast<std::uint8_t>(std::lround((t + m) * 255.0)); };
  return {to8(r), to8(g), to8(b)};
}

}  // namespace

Rgb palette_color(std::size_t index) {
  const double golden = 0.6180339887498949;
  const double h = std::fmod(0.13 + static_cast<double>(index) * golden, 1.0);
  const double s = 0.55 + 0.15 * static_cast<double>(index % 3);
  const double v = 0.95 - 0.1 * static_cast<double>((index / 3) % 3);
  return hsv(h, s, v);
}

Image render_overlay(const Scene& scene, std::span<const RasterMask> masks) {
  Image img{scene.width, scene.height, {}};
  img.pixels.resize(static_cast<std::size_t>(scene.width) * scene.height * 3);
  for (std::size_t p = 0; p < img.pixels.size(); p += 3) {
    img.pixels[p] = kBackground[0];
    img.pixels[p + 1] = kBackground[1];
    img.pixels[p + 2] = kBackground[2];
  }
  for (std::size_t k = 0; k < masks.size(); ++k) {
    if (masks[k].width() != scene.width || masks[k].height() != scene.height) {
      throw Error(ErrorKind::SizeMismatch, "mask does not match the scene size");
    }
    const Rgb col = palette_color(k);
    const auto bits = masks[k].bits();
    for (std::size_t p = 0; p < bits.size(); ++p) {
      if (!bits[p]) continue;
      img.pixels[p * 3] = col[0];
      img.pixels[p * 3 + 1] = col[1];
      img.pixels[p * 3 + 2] = col[2];
    }
  }
  constexpr int kCross[5][2] = {{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (const auto& pt : scene.points) {
    const int pc = static_cast<int>(std::floor(pt.x));
    const int pr = static_cast<int>(std::floor(pt.y));
    for (const auto& d : kCross) {
      const int c = pc + d[0];
      const int r = pr + d[1];
      if (c < 0 || r < 0 || c >= scene.width || r >= scene.height) continue;
      const std::size_t p = (static_cast<std::size_t>(r) * scene.width + c) * 3;
      img.pixels[p] = kPoint[0];
      img.pixels[p + 1] = kPoint[1];
      img.pixels[p + 2] = kPoint[2];
    }
  }
  return img;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw Error(ErrorKind::IoError, "cannot write " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::IoError, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoError, "libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < image.height; ++r) {
    png_write_row(png, image.pixels.data() + static_cast<std::size_t>(r) * image.width * 3);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void render_overlay(const Scene& scene, std::span<const RasterMask> masks,
                    const std::filesystem::path& out_path) {
  write_png(out_path, render_overlay(scene, masks));
}

}  // namespace crowdmask
