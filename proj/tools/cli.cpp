#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "crowdmask/counting_losses.hpp"
#include "crowdmask/error.hpp"
#include "crowdmask/io.hpp"
#include "crowdmask/pipeline.hpp"
#include "crowdmask/render.hpp"

namespace crowdmask::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

const std::set<std::string> kSubcommands = {"synth", "dpmo",   "select",  "train",
                                            "eval",  "loss",   "render",  "pipeline"};

// Thrown for bad flag values that CLI11 cannot validate on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Splices `--config file.json` into the argument list right after the
// subcommand name, so flags given on the command line win (TakeLast).
// Top-level keys apply to every subcommand; an object under the
// subcommand's name overrides them.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;

  const auto sub_it = std::find_if(args.begin(), args.end(),
                                   [](const std::string& a) { return kSubcommands.count(a) > 0; });
  if (sub_it == args.end()) throw UsageError("--config needs a subcommand");
  const std::string sub = *sub_it;
  json cfg;
  try {
    cfg = json::parse(io::read_text(*path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, "config file: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw Error(ErrorKind::ParseError, "config file must be a JSON object");

  json merged = json::object();
  for (const auto& [key, value] : cfg.items()) {
    if (!kSubcommands.count(key)) merged[key] = value;
  }
  if (cfg.contains(sub) && cfg[sub].is_object()) {
    for (const auto& [key, value] : cfg[sub].items()) merged[key] = value;
  }

  std::vector<std::string> tokens;
  for (const auto& [key, value] : merged.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      tokens.push_back(flag + "=" + (value.get<bool>() ? "true" : "false"));
    } else if (value.is_array()) {
      for (const auto& v : value) {
        tokens.push_back(flag);
        tokens.push_back(json_scalar(v));
      }
    } else {
      tokens.push_back(flag);
      tokens.push_back(json_scalar(value));
    }
  }
  // `loss` takes its kind as the first positional; keep it in front.
  auto insert_at = sub_it + 1;
  if (sub == "loss" && insert_at != args.end() && insert_at->rfind("-", 0) != 0) ++insert_at;
  args.insert(insert_at, tokens.begin(), tokens.end());
  return args;
}

struct NnecFlags {
  NnecParams params;
  void add(CLI::App* app) {
    app->add_option("--r-min", params.r_min, "Minimum exclusion radius (px)")->capture_default_str();
    app->add_option("--r-max", params.r_max, "Maximum exclusion radius (px)")->capture_default_str();
    app->add_option("--delta", params.delta, "Gap below the nearest-neighbor distance (px)")
        ->capture_default_str();
    app->add_flag("--bounded", params.bounded, "Non-overlapping circles (radius from d/2)");
  }
};

struct SegmenterFlags {
  std::string kind = "oracle";
  std::string proposals;
  int noise = 2;
  double p_miss = 0.05;
  std::string gt_masks;
  std::string gt_points;

  void add(CLI::App* app) {
    app->add_option("--segmenter", kind, "Segmenter backend")
        ->check(CLI::IsMember({"circle", "oracle", "file"}))
        ->capture_default_str();
    app->add_option("--proposals", proposals, "RLE proposals for the file backend");
    app->add_option("--noise", noise, "Oracle dilation/erosion range (px)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--p-miss", p_miss, "Oracle miss probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--gt-masks", gt_masks, "Ground-truth masks (RLE JSON)");
    app->add_option("--gt-points", gt_points,
                    "Ground-truth points aligned with --gt-masks (default: mask centroids)");
  }

  // Synthetic scenes carry their own ground truth, so only file-backed runs
  // need --gt-masks for the oracle.
  SegmenterConfig config(const NnecParams& nnec, bool gt_from_scene = false) const {
    SegmenterConfig cfg;
    cfg.kind = parse_segmenter_kind(kind);
    cfg.oracle = {noise, p_miss, 2.0 * nnec.r_max};
    cfg.file.bind_radius = 2.0 * nnec.r_max;
    if (cfg.kind == SegmenterKind::File) {
      if (proposals.empty()) throw UsageError("--segmenter file needs --proposals");
      cfg.file.records = io::parse_rle_records(io::read_text(proposals));
    }
    if (cfg.kind == SegmenterKind::Oracle && gt_masks.empty() && !gt_from_scene) {
      throw UsageError("--segmenter oracle needs --gt-masks");
    }
    return cfg;
  }

  // Scene of the given size carrying the ground truth when provided.
  Scene scene(int width, int height) const {
    Scene s;
    s.width = width;
    s.height = height;
    if (gt_masks.empty()) return s;
    auto masks = io::read_masks(gt_masks);
    if (!gt_points.empty()) {
      s.points = io::read_points(gt_points).points;
    } else {
      for (const auto& m : masks) {
        const Point2D c = mask_centroid(m);
        s.points.push_back(m.empty() ? Point2D{0.0, 0.0} : clamp_to_image(c, width, height));
      }
    }
    s.gt_masks = std::move(masks);
    validate(s);
    return s;
  }
};

struct SigmaFlags {
  double sigma = 1.0;
  std::optional<double> sparse;
  std::optional<double> dense;
  void add(CLI::App* app) {
    app->add_option("--sigma", sigma, "Gaussian radius for candidate sampling (both regimes)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--sigma-sparse", sparse, "Gaussian radius in sparse areas")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--sigma-dense", dense, "Gaussian radius in dense areas")
        ->check(CLI::NonNegativeNumber);
  }
  SamplingSigma value(const NnecParams& nnec) const {
    return {sparse.value_or(sigma), dense.value_or(sigma), 2.0 * nnec.r_min};
  }
};

void print_json(std::ostream& out, const ordered_json& j) { out << j.dump(2) << "\n"; }

// --- subcommands -----------------------------------------------------------

struct SynthCmd {
  int n_heads = 20;
  std::string regime = "sparse";
  std::uint64_t seed = 7;
  std::optional<int> width, height;
  std::optional<double> r_head_min, r_head_max, spacing;
  std::string density = "none";
  std::string out_dir;

  void add(CLI::App* app) {
    app->add_option("--n-heads", n_heads, "Number of heads")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--regime", regime, "Density regime")
        ->check(CLI::IsMember({"sparse", "dense", "mixed"}))
        ->capture_default_str();
    app->add_option("--seed", seed, "Master seed")->capture_default_str();
    app->add_option("--width", width, "Image width (default: sized from the regime)");
    app->add_option("--height", height, "Image height (default: sized from the regime)");
    app->add_option("--head-radius-min", r_head_min, "Smallest head semi-axis (px)");
    app->add_option("--head-radius-max", r_head_max, "Largest head semi-axis (px)");
    app->add_option("--spacing", spacing, "Minimum center spacing (px)");
    app->add_option("--density", density, "Also write a density map")
        ->check(CLI::IsMember({"none", "perfect", "uniform_mass"}))
        ->capture_default_str();
    app->add_option("--out", out_dir, "Output scene directory")->required();
  }

  int run(std::ostream& out) const {
    SynthConfig cfg = SynthConfig::preset(parse_regime(regime), n_heads, seed);
    if (width) cfg.width = *width;
    if (height) cfg.height = *height;
    if (r_head_min) cfg.head_radius_min = *r_head_min;
    if (r_head_max) cfg.head_radius_max = *r_head_max;
    if (spacing) cfg.min_center_spacing = *spacing;
    const Scene scene = generate_scene(cfg);
    io::write_scene(out_dir, scene);
    if (density != "none") {
      io::write_density(fs::path(out_dir) / "density.json",
                        make_density_map(scene, parse_density_mode(density)));
    }
    print_json(out, {{"image_id", scene.image_id},
                     {"width", scene.width},
                     {"height", scene.height},
                     {"n_heads", scene.points.size()},
                     {"out", out_dir}});
    return kOk;
  }
};

struct DpmoCmd {
  std::string points;
  std::string out_path;
  std::string render;
  std::uint64_t seed = 7;
  int jobs = 1;
  NnecFlags nnec;
  SegmenterFlags seg;

  void add(CLI::App* app) {
    app->add_option("--points", points, "Prompt points file")->required();
    app->add_option("--out", out_path, "Output masks file")->required();
    app->add_option("--render", render, "Overlay PNG");
    app->add_option("--seed", seed, "Master seed")->capture_default_str();
    app->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)
        ->capture_default_str();
    nnec.add(app);
    seg.add(app);
  }

  int run(std::ostream& out) const {
    const auto pts = io::read_points(points);
    Scene scene = seg.scene(pts.width, pts.height);
    const auto segmenter = make_segmenter(seg.config(nnec.params));
    const auto result = run_dpmo(pts.points, scene, *segmenter, nnec.params,
                                 derive_seed(seed, "dpmo"), {.threads = jobs});
    io::write_masks(out_path, result.masks);
    if (!render.empty()) {
      Scene shown = scene;
      shown.points = pts.points;
      render_overlay(shown, result.masks, render);
    }
    const auto fallbacks = std::count(result.fallback.begin(), result.fallback.end(), true);
    print_json(out, {{"masks", result.masks.size()}, {"fallbacks", fallbacks}, {"out", out_path}});
    return kOk;
  }
};

struct SelectCmd {
  std::string points;
  std::string out_path;
  std::string scorer = "reward-oracle";
  int group_size = 5;
  std::uint64_t seed = 7;
  SigmaFlags sigma;
  NnecFlags nnec;
  SegmenterFlags seg;

  void add(CLI::App* app) {
    app->add_option("--points", points, "Initial predicted points")->required();
    app->add_option("--out", out_path, "Selected points file")->required();
    app->add_option("--scorer", scorer, "reward-oracle | trained:<weights.json>")
        ->capture_default_str();
    app->add_option("--group-size", group_size, "Candidates per group (fixed at 5)")
        ->capture_default_str();
    app->add_option("--seed", seed, "Master seed")->capture_default_str();
    sigma.add(app);
    nnec.add(app);
    seg.add(app);
  }

  int run(std::ostream& out) const {
    if (group_size != static_cast<int>(kGroupSize)) throw UsageError("--group-size must be 5");
    std::optional<ScorerModel> model;
    if (scorer.rfind("trained:", 0) == 0) {
      model = parse_scorer(io::read_text(scorer.substr(8)));
    } else if (scorer != "reward-oracle") {
      throw UsageError("--scorer must be reward-oracle or trained:<path>");
    }
    const auto pts = io::read_points(points);
    Scene scene = seg.scene(pts.width, pts.height);
    if (!model && !scene.gt_masks) throw UsageError("reward-oracle selection needs --gt-masks");
    if (scene.gt_masks && scene.gt_masks->size() != pts.points.size() && !model) {
      throw Error(ErrorKind::LengthMismatch, "gt masks must align with the predicted points");
    }
    const auto segmenter = make_segmenter(seg.config(nnec.params));
    auto groups = sample_groups(pts.points, sigma.value(nnec.params), pts.width, pts.height,
                                derive_seed(seed, "groups"));
    const CandidateEvaluator evaluator(pts.points, scene, *segmenter, nnec.params,
                                       derive_seed(seed, "dpmo"));
    score_groups(groups, evaluator, scene, !model);
    io::PointsFile selected{pts.width, pts.height, pts.points};
    std::size_t changed = 0;
    for (auto& g : groups) {
      std::size_t pick = g.best;
      if (model) {
        apply_scorer(g, *model);
        pick = select_index(g, *model);
      }
      selected.points[g.index] = g.candidates[pick];
      changed += pick != 0;
    }
    io::write_points(out_path, selected);
    print_json(out, {{"groups", groups.size()}, {"changed", changed}, {"out", out_path}});
    return kOk;
  }
};

struct TrainCmd {
  int n_scenes = 8;
  int n_heads = 20;
  std::string regime = "sparse";
  double pred_sigma = 1.0;
  double lr = 0.01;
  int epochs = 200;
  std::uint64_t seed = 7;
  std::string out_path;
  SigmaFlags sigma;
  NnecFlags nnec;
  SegmenterFlags seg;

  void add(CLI::App* app) {
    app->add_option("--n-scenes", n_scenes, "Synthetic training scenes")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--n-heads", n_heads, "Heads per scene")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--regime", regime, "Density regime")
        ->check(CLI::IsMember({"sparse", "dense", "mixed"}))
        ->capture_default_str();
    app->add_option("--pred-sigma", pred_sigma, "Noise of the simulated initial predictions")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--lr", lr, "Learning rate")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--epochs", epochs, "Full-batch epochs")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--seed", seed, "Master seed")->capture_default_str();
    app->add_option("--out", out_path, "Scorer weights file")->required();
    sigma.add(app);
    nnec.add(app);
    seg.add(app);
  }

  int run(std::ostream& out) const {
    std::vector<CandidateGroup> all;
    for (int i = 0; i < n_scenes; ++i) {
      const auto image_seed = derive_seed(seed, "train/" + std::to_string(i));
      const Scene scene = generate_scene(
          SynthConfig::preset(parse_regime(regime), n_heads, derive_seed(image_seed, "synth")));
      const auto segmenter = make_segmenter(seg.config(nnec.params, true));
      Rng perturb = derive_rng(image_seed, "perturb");
      const auto initial =
          perturb_points(scene.points, pred_sigma, perturb, scene.width, scene.height);
      auto groups = sample_groups(initial, sigma.value(nnec.params), scene.width, scene.height,
                                  derive_seed(image_seed, "groups"));
      const CandidateEvaluator evaluator(initial, scene, *segmenter, nnec.params,
                                         derive_seed(image_seed, "dpmo"));
      score_groups(groups, evaluator, scene, true);
      all.insert(all.end(), groups.begin(), groups.end());
    }
    const TrainResult trained = train_scorer(all, {.lr = lr, .epochs = epochs, .seed = seed});
    io::write_text(out_path, format_scorer(trained.model));
    print_json(out, {{"groups", all.size()},
                     {"initial_loss", trained.loss_history.front()},
                     {"final_loss", trained.loss_history.back()},
                     {"out", out_path}});
    return kOk;
  }
};

struct EvalCmd {
  std::string pred;
  std::string gt;
  double threshold = 0.5;
  std::string report;

  void add(CLI::App* app) {
    app->add_option("--pred", pred, "Predicted masks (RLE JSON)")->required();
    app->add_option("--gt", gt, "Ground-truth masks (RLE JSON)")->required();
    app->add_option("--iou-threshold", threshold, "IoU needed for a true positive")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--report", report, "Write the report here as well");
  }

  int run(std::ostream& out) const {
    if (!(threshold > 0.0)) throw UsageError("--iou-threshold must lie in (0,1]");
    const auto preds = io::read_masks(pred);
    const auto gts = io::read_masks(gt);
    if (gts.empty()) throw Error(ErrorKind::EmptyGroundTruth, "no ground-truth masks");
    std::vector<ImageEvaluation> evals;
    evals.push_back(evaluate_image(preds, gts, threshold, fs::path(gt).stem().string()));
    const std::string text = format_report(aggregate(std::move(evals)));
    if (!report.empty()) io::write_text(report, text);
    out << text;
    return kOk;
  }
};

struct LossCmd {
  std::string kind;
  std::string map;
  std::string masks;
  std::string pred;
  std::string gt;
  std::string method = "exact";

  void add(CLI::App* app) {
    app->add_option("kind", kind, "density | match")
        ->required()
        ->check(CLI::IsMember({"density", "match"}));
    app->add_option("--map", map, "Density map (.bin or .json header)");
    app->add_option("--masks", masks, "Masks (RLE JSON)")->required();
    app->add_option("--pred", pred, "Predicted points file");
    app->add_option("--gt", gt, "Ground-truth points file");
    app->add_option("--method", method, "Matching method")
        ->check(CLI::IsMember({"three-case", "exact"}))
        ->capture_default_str();
  }

  int run(std::ostream& out) const {
    const auto m = io::read_masks(masks);
    if (kind == "density") {
      if (map.empty()) throw UsageError("loss density needs --map");
      const DensityMap d = io::read_density(map);
      print_json(out, {{"loss", density_mask_loss(d, m)}});
      return kOk;
    }
    if (pred.empty() || gt.empty()) throw UsageError("loss match needs --pred and --gt");
    MatchingProblem problem{io::read_points(pred).points, io::read_points(gt).points, m};
    const Matching r = method == "exact" ? match_exact(problem) : match_three_case(problem);
    ordered_json pairs = ordered_json::array();
    for (const auto& [i, j] : r.pairs) pairs.push_back({i, j});
    print_json(out, {{"method", method},
                     {"pairs", pairs},
                     {"total_cost", r.total_cost},
                     {"unmatched_pred", r.unmatched_pred},
                     {"unmatched_gt", r.unmatched_gt}});
    return kOk;
  }
};

struct RenderCmd {
  std::string points;
  std::string masks;
  std::string out_path;

  void add(CLI::App* app) {
    app->add_option("--points", points, "Points file")->required();
    app->add_option("--masks", masks, "Masks (RLE JSON)")->required();
    app->add_option("--out", out_path, "Output PNG")->required();
  }

  int run(std::ostream& out) const {
    const auto pts = io::read_points(points);
    Scene scene{pts.width, pts.height, pts.points, std::nullopt, {}};
    render_overlay(scene, io::read_masks(masks), out_path);
    print_json(out, {{"out", out_path}});
    return kOk;
  }
};

struct PipelineCmd {
  std::vector<std::string> scene_dirs;
  int images = 1;
  int n_heads = 40;
  std::string regime = "dense";
  double pred_sigma = 1.0;
  std::string scorer = "reward-oracle";
  double threshold = 0.5;
  std::string report;
  std::string render_dir;
  std::uint64_t seed = 7;
  int jobs = 1;
  SigmaFlags sigma;
  NnecFlags nnec;
  SegmenterFlags seg;

  void add(CLI::App* app) {
    app->add_option("--scene", scene_dirs, "Scene directories to load instead of synthesizing");
    app->add_option("--images", images, "Synthetic scenes")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--n-heads", n_heads, "Heads per synthetic scene")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--regime", regime, "Density regime")
        ->check(CLI::IsMember({"sparse", "dense", "mixed"}))
        ->capture_default_str();
    app->add_option("--pred-sigma", pred_sigma, "Noise of the simulated initial predictions")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--scorer", scorer, "reward-oracle | candidate0 | trained:<weights.json>")
        ->capture_default_str();
    app->add_option("--iou-threshold", threshold, "IoU needed for a true positive")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--report", report, "Write the report here as well");
    app->add_option("--render-dir", render_dir, "Write one overlay PNG per image here");
    app->add_option("--seed", seed, "Master seed")->capture_default_str();
    app->add_option("--jobs", jobs, "Images processed in parallel")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sigma.add(app);
    nnec.add(app);
    seg.add(app);
  }

  int run(std::ostream& out) const {
    if (!(threshold > 0.0)) throw UsageError("--iou-threshold must lie in (0,1]");
    PipelineConfig cfg;
    cfg.images = images;
    cfg.synth = SynthConfig::preset(parse_regime(regime), n_heads, 0);
    cfg.pred_sigma = pred_sigma;
    cfg.sigma = sigma.value(nnec.params);
    if (scorer == "reward-oracle") {
      cfg.selection = SelectionMode::RewardOracle;
    } else if (scorer == "candidate0") {
      cfg.selection = SelectionMode::Candidate0;
    } else if (scorer.rfind("trained:", 0) == 0) {
      cfg.selection = SelectionMode::Trained;
      cfg.scorer = parse_scorer(io::read_text(scorer.substr(8)));
    } else {
      throw UsageError("--scorer must be reward-oracle, candidate0 or trained:<path>");
    }
    cfg.segmenter = seg.config(nnec.params, true);
    cfg.nnec = nnec.params;
    cfg.iou_threshold = threshold;
    cfg.seed = seed;
    cfg.jobs = jobs;

    std::optional<std::vector<Scene>> scenes;
    if (!scene_dirs.empty()) {
      scenes.emplace();
      for (const auto& d : scene_dirs) scenes->push_back(io::read_scene(d));
    }
    const PipelineRun run = run_pipeline(cfg, std::move(scenes));
    if (!render_dir.empty()) {
      for (const auto& img : run.images) {
        Scene shown = img.scene;
        shown.points = img.selected;
        render_overlay(shown, img.dpmo.masks,
                       fs::path(render_dir) / (img.scene.image_id + ".png"));
      }
    }
    const std::string text = format_report(run.report);
    if (!report.empty()) io::write_text(report, text);
    out << text;
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Point-prompted crowd instance masks: exclusion circles, candidate selection, "
               "mask-supervised losses and evaluation"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.add_option("--config", "JSON config file; command-line flags override it");

  SynthCmd synth;
  DpmoCmd dpmo;
  SelectCmd select;
  TrainCmd train;
  EvalCmd eval;
  LossCmd loss;
  RenderCmd render;
  PipelineCmd pipeline;
  synth.add(app.add_subcommand("synth", "Generate a seeded synthetic crowd scene"));
  dpmo.add(app.add_subcommand("dpmo", "Masks from point prompts under exclusion circles"));
  select.add(app.add_subcommand("select", "Pick one prompt per group of 5 candidates"));
  train.add(app.add_subcommand("train", "Train the linear candidate scorer on synthetic scenes"));
  eval.add(app.add_subcommand("eval", "IoU / precision / recall / F1 via Hungarian matching"));
  loss.add(app.add_subcommand("loss", "Mask-supervised density loss or point matching"));
  render.add(app.add_subcommand("render", "Overlay masks and points into a PNG"));
  pipeline.add(app.add_subcommand("pipeline", "synth -> perturb -> select -> dpmo -> eval"));

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << "run '" << sub->get_name() << " --help' for usage\n";
    } else {
      err << app.help();
    }
    return kUsageError;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "synth") return synth.run(out);
    if (name == "dpmo") return dpmo.run(out);
    if (name == "select") return select.run(out);
    if (name == "train") return train.run(out);
    if (name == "eval") return eval.run(out);
    if (name == "loss") return loss.run(out);
    if (name == "render") return render.run(out);
    if (name == "pipeline") return pipeline.run(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace crowdmask::cli
