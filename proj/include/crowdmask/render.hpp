#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "crowdmask/types.hpp"

namespace crowdmask {

using Rgb = std::array<std::uint8_t, 3>;

// Deterministic color for mask `index`.
Rgb palette_color(std::size_t index);

struct Image {
  int width = 0;
  int height = 0;
  // Interleaved RGB, row-major.
  std::vector<std::uint8_t> pixels;
};

// Background-only image with each mask filled in its palette color and each
// point drawn as a white 3x3 cross.
Image render_overlay(const Scene& scene, std::span<const RasterMask> masks);

// Lossless PNG. Byte-identical for identical images.
void write_png(const std::filesystem::path& path, const Image& image);

void render_overlay(const Scene& scene, std::span<const RasterMask> masks,
                    const std::filesystem::path& out_path);

}  // namespace crowdmask
