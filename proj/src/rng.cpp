#include "crowdmask/rng.hpp"

#include <cmath>
#include <numbers>

namespace crowdmask {

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian(double mean, double sigma) {
  double z;
  if (spare_) {
    z = *spare_;
    spare_.reset();
  } else {
    // 1 - u keeps the log argument in (0,1].
    const double u1 = 1.0 - next_uniform();
    const double u2 = next_uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    z = mag * std::cos(angle);
    spare_ = mag * std::sin(angle);
  }
  if (sigma == 0.0) return mean;
  return mean + sigma * z;
}

int Rng::next_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
  const auto offset = static_cast<std::uint64_t>(next_uniform() * static_cast<double>(span));
  return lo + static_cast<int>(offset < span ? offset : span - 1);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view entity_id) {
  return master_seed ^ fnv1a64(entity_id);
}

}  // namespace crowdmask
