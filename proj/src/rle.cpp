#include "crowdmask/rle.hpp"

#include <numeric>

#include "crowdmask/error.hpp"

namespace crowdmask {

RleRecord rle_encode(const RasterMask& mask) {
  RleRecord rec{mask.height(), mask.width(), {}};
  const auto bits = mask.bits();
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::uint8_t b : bits) {
    if (b != current) {
      rec.counts.push_back(run);
      current = b;
      run = 0;
    }
    ++run;
  }
  rec.counts.push_back(run);
  return rec;
}

RasterMask rle_decode(const RleRecord& record) {
  if (record.width <= 0 || record.height <= 0) {
    throw Error(ErrorKind::SizeMismatch, "RLE size must be positive");
  }
  const std::uint64_t total = static_cast<std::uint64_t>(record.width) * record.height;
  const std::uint64_t sum =
      std::accumulate(record.counts.begin(), record.counts.end(), std::uint64_t{0});
  if (sum != total) {
    throw Error(ErrorKind::SizeMismatch, "RLE counts sum to " + std::to_string(sum) +
                                             ", expected " + std::to_string(total));
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(total);
  std::uint8_t value = 0;
  for (std::uint32_t run : record.counts) {
    bits.insert(bits.end(), run, value);
    value ^= 1;
  }
  return RasterMask(record.width, record.height, std::move(bits));
}

}  // namespace crowdmask
