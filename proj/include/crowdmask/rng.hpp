#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace crowdmask {

// SplitMix64 with Box-Muller normals. Single owner; copy to fork a stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0,1) with 53 bits of resolution.
  double next_uniform();

  // Box-Muller: the cosine branch is returned first and the sine branch is
  // cached for the following call. sigma == 0 still consumes the draw so
  // stream positions do not depend on sigma.
  double next_gaussian(double mean, double sigma);

  // Uniform integer in [lo, hi].
  int next_int(int lo, int hi);

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

std::uint64_t fnv1a64(std::string_view text);

// Independent stream per named entity: master_seed ^ fnv1a64(entity_id).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view entity_id);

inline Rng derive_rng(std::uint64_t master_seed, std::string_view entity_id) {
  return Rng(derive_seed(master_seed, entity_id));
}

}  // namespace crowdmask
