#include "crowdmask/pipeline.hpp"

#include <exception>

#include "crowdmask/error.hpp"

namespace crowdmask {

ImageRun run_image(const Scene& scene, const PipelineConfig& config, std::uint64_t image_seed) {
  validate(scene);
  if (!scene.gt_masks) throw Error(ErrorKind::MissingGroundTruth, "pipeline needs gt masks");
  if (scene.points.empty()) throw Error(ErrorKind::EmptyPointSet, "scene has no points");
  if (config.selection == SelectionMode::Trained && !config.scorer) {
    throw Error(ErrorKind::InvalidArgument, "trained selection needs a scorer model");
  }
  ImageRun run;
  run.scene = scene;
  Rng perturb = derive_rng(image_seed, "perturb");
  run.initial = perturb_points(scene.points, config.pred_sigma, perturb, scene.width, scene.height);

  const auto segmenter = make_segmenter(config.segmenter);
  // Candidate evaluation and the final DPMO share one seed so a selected
  // candidate reproduces the mask it was scored on.
  const std::uint64_t dpmo_seed = derive_seed(image_seed, "dpmo");
  run.groups = sample_groups(run.initial, config.sigma, scene.width, scene.height,
                             derive_seed(image_seed, "groups"));

  run.selected = run.initial;
  if (config.selection != SelectionMode::Candidate0) {
    const CandidateEvaluator evaluator(run.initial, scene, *segmenter, config.nnec, dpmo_seed);
    score_groups(run.groups, evaluator, scene, config.selection == SelectionMode::RewardOracle);
    for (auto& g : run.groups) {
      std::size_t pick = 0;
      if (config.selection == SelectionMode::RewardOracle) {
        pick = g.best;
      } else {
        apply_scorer(g, *config.scorer);
        pick = select_index(g, *config.scorer);
      }
      run.selected[g.index] = g.candidates[pick];
    }
  }

  run.dpmo = run_dpmo(run.selected, scene, *segmenter, config.nnec, dpmo_seed);
  run.evaluation =
      evaluate_image(run.dpmo.masks, *scene.gt_masks, config.iou_threshold, scene.image_id);
  return run;
}

PipelineRun run_pipeline(const PipelineConfig& config, std::optional<std::vector<Scene>> scenes) {
  if (config.jobs < 1) throw Error(ErrorKind::InvalidArgument, "jobs must be >= 1");
  if (!scenes) {
    if (config.images < 1) throw Error(ErrorKind::InvalidArgument, "images must be >= 1");
    scenes.emplace();
    for (int i = 0; i < config.images; ++i) {
      SynthConfig cfg = config.synth;
      cfg.seed = derive_seed(config.seed, "image/" + std::to_string(i) + "/synth");
      Scene s = generate_scene(cfg);
      s.image_id = "image-" + std::to_string(i);
      scenes->push_back(std::move(s));
    }
  }

  PipelineRun result;
  result.images.resize(scenes->size());
  const auto n = static_cast<std::int64_t>(scenes->size());
  std::vector<std::exception_ptr> errors(scenes->size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.jobs) if (config.jobs > 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      const auto seed = derive_seed(config.seed, "image/" + std::to_string(i) + "/run");
      result.images[i] = run_image((*scenes)[i], config, seed);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<ImageEvaluation> evals;
  for (const auto& img : result.images) evals.push_back(img.evaluation);
  result.report = aggregate(std::move(evals));
  return result;
}

}  // namespace crowdmask
