#pragma once

#include <cstdint>
#include <vector>

#include "crowdmask/types.hpp"

namespace crowdmask {

// Run lengths over the row-major bit stream. The first run counts zeros and
// may be 0, so a mask starting with a set pixel begins with counts[0] == 0.
struct RleRecord {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const RleRecord&, const RleRecord&) = default;
};

RleRecord rle_encode(const RasterMask& mask);

// Throws SizeMismatch when the counts do not sum to height*width.
RasterMask rle_decode(const RleRecord& record);

}  // namespace crowdmask
