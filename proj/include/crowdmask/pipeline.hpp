#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crowdmask/dpmo.hpp"
#include "crowdmask/eval.hpp"
#include "crowdmask/rps.hpp"
#include "crowdmask/synth.hpp"

namespace crowdmask {

enum class SelectionMode { RewardOracle, Candidate0, Trained };

struct PipelineConfig {
  SynthConfig synth;
  int images = 1;
  // Noise of the simulated initial point predictions.
  double pred_sigma = 1.0;
  // Gaussian radius for candidate sampling.
  SamplingSigma sigma;
  SelectionMode selection = SelectionMode::RewardOracle;
  std::optional<ScorerModel> scorer;
  SegmenterConfig segmenter;
  NnecParams nnec;
  double iou_threshold = 0.5;
  std::uint64_t seed = 7;
  // Images processed concurrently; results do not depend on it.
  int jobs = 1;
};

struct ImageRun {
  Scene scene;
  std::vector<Point2D> initial;
  std::vector<Point2D> selected;
  std::vector<CandidateGroup> groups;
  DpmoResult dpmo;
  ImageEvaluation evaluation;
};

// perturb -> sample groups -> select -> DPMO -> evaluate for one scene.
ImageRun run_image(const Scene& scene, const PipelineConfig& config, std::uint64_t image_seed);

struct PipelineRun {
  std::vector<ImageRun> images;
  EvalReport report;
};

// Synthesizes config.images scenes unless `scenes` is given.
PipelineRun run_pipeline(const PipelineConfig& config,
                         std::optional<std::vector<Scene>> scenes = std::nullopt);

}  // namespace crowdmask
