#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdmask/nnec.hpp"
#include "crowdmask/segmenter.hpp"

namespace crowdmask {

struct DpmoResult {
  std::vector<RasterMask> masks;
  std::vector<ExclusionCircle> circles;
  // True where the exclusion circle itself was adopted.
  std::vector<bool> fallback;
};

struct DpmoOptions {
  // 0 = OpenMP default; 1 runs the serial reference path.
  int threads = 0;
};

// Stream id for the segmenter call of prompt `index`. The prompt coordinates
// are part of the id, so a segmenter answers a given prompt position the same
// way no matter which other prompts are present.
std::string prompt_stream_id(std::size_t index, const Point2D& prompt);

using Proposal = std::optional<RasterMask>;

// One segmenter call per prompt, each on its own derived stream.
std::vector<Proposal> query_proposals(std::span<const Point2D> prompts, const Scene& scene,
                                      const Segmenter& segmenter, std::uint64_t seed,
                                      const DpmoOptions& options = {});

// Circles, constraint with fallback, overlap resolution, and a final repair
// step that hands a pixel to any prompt left empty (coincident prompts).
DpmoResult run_dpmo(std::span<const Point2D> prompts, const Scene& scene,
                    const Segmenter& segmenter, const NnecParams& params, std::uint64_t seed,
                    const DpmoOptions& options = {});

// Non-owning view of proposals; nullptr means the segmenter returned nothing.
std::vector<const RasterMask*> proposal_view(std::span<const Proposal> proposals);

// Same as run_dpmo with the segmenter answers already known.
DpmoResult run_dpmo_with_proposals(std::span<const Point2D> prompts,
                                   std::span<const RasterMask* const> proposals, int width,
                                   int height, const NnecParams& params,
                                   const DpmoOptions& options = {});

// Constraint, overlap resolution and repair for precomputed circles.
DpmoResult constrain_and_resolve(std::span<const Point2D> prompts,
                                 std::span<const ExclusionCircle> circles,
                                 std::span<const RasterMask* const> proposals, int width,
                                 int height, const DpmoOptions& options = {});

}  // namespace crowdmask
