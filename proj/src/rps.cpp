#include "crowdmask/rps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "crowdmask/error.hpp"
#include "crowdmask/eval.hpp"

namespace crowdmask {

std::array<Point2D, kGroupSize> sample_group(const Point2D& initial, double sigma, Rng& rng,
                                             int width, int height) {
  if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must be >= 0");
  std::array<Point2D, kGroupSize> out;
  out[0] = initial;
  for (std::size_t c = 1; c < kGroupSize; ++c) {
    const double x = rng.next_gaussian(initial.x, sigma);
    const double y = rng.next_gaussian(initial.y, sigma);
    out[c] = clamp_to_image({x, y}, width, height);
  }
  return out;
}

std::vector<CandidateGroup> sample_groups(std::span<const Point2D> initial,
                                          const SamplingSigma& sigma, int width, int height,
                                          std::uint64_t seed) {
  const std::vector<double> nn = nearest_neighbor_sq(initial);
  std::vector<CandidateGroup> groups(initial.size());
  for (std::size_t i = 0; i < initial.size(); ++i) {
    Rng rng = derive_rng(seed, "group/" + std::to_string(i));
    const bool dense = nn[i] < sigma.dense_distance * sigma.dense_distance;
    groups[i].index = i;
    groups[i].candidates =
        sample_group(initial[i], dense ? sigma.dense : sigma.sparse, rng, width, height);
  }
  return groups;
}

std::vector<CandidateGroup> sample_groups(std::span<const Point2D> initial, double sigma,
                                          int width, int height, std::uint64_t seed) {
  return sample_groups(initial, SamplingSigma{sigma, sigma, 10.0}, width, height, seed);
}

CandidateEvaluator::CandidateEvaluator(std::span<const Point2D> initial, const Scene& scene,
                                       const Segmenter& segmenter, const NnecParams& params,
                                       std::uint64_t seed)
    : initial_(initial.begin(), initial.end()),
      scene_(scene),
      segmenter_(segmenter),
      params_(params),
      seed_(seed) {
  validate(params_);
  if (initial_.empty()) throw Error(ErrorKind::EmptyPointSet, "no initial predictions");
  base_proposals_ = query_proposals(initial_, scene_, segmenter_, seed_, {.threads = 1});
}

namespace {

CandidateOutcome outcome_of(const DpmoResult& result, std::size_t k, int width, int height) {
  CandidateOutcome out;
  out.mask = result.masks[k];
  out.circle_population =
      static_cast<double>(rasterize_circle(result.circles[k], width, height).population());
  out.fallback = result.fallback[k];
  return out;
}

bool boxes_touch(const ExclusionCircle& a, const ExclusionCircle& b, int width, int height) {
  return !circle_box(a, width, height).intersect(circle_box(b, width, height)).empty();
}

}  // namespace

std::array<CandidateOutcome, kGroupSize> CandidateEvaluator::evaluate(
    const CandidateGroup& group) const {
  const std::size_t k = group.index;
  if (k >= initial_.size()) throw Error(ErrorKind::InvalidArgument, "group index out of range");
  const int w = scene_.width;
  const int h = scene_.height;
  std::array<CandidateOutcome, kGroupSize> outcomes;
  std::vector<Point2D> prompts = initial_;
  for (std::size_t c = 0; c < kGroupSize; ++c) {
    const Point2D cand = group.candidates[c];
    prompts[k] = cand;
    Rng rng = derive_rng(seed_, prompt_stream_id(k, cand));
    const Proposal own = segmenter_.segment(cand, scene_, rng);
    const auto circles = all_radii(prompts, params_);

    // Global order is kept because overlap resolution breaks ties by index.
    std::vector<Point2D> local_prompts;
    std::vector<ExclusionCircle> local_circles;
    std::vector<const RasterMask*> local_props;
    std::size_t pos = 0;
    for (std::size_t j = 0; j < prompts.size(); ++j) {
      if (j == k) {
        pos = local_prompts.size();
        local_props.push_back(own ? &*own : nullptr);
      } else if (boxes_touch(circles[j], circles[k], w, h)) {
        local_props.push_back(base_proposals_[j] ? &*base_proposals_[j] : nullptr);
      } else {
        continue;
      }
      local_prompts.push_back(prompts[j]);
      local_circles.push_back(circles[j]);
    }
    const DpmoResult result =
        constrain_and_resolve(local_prompts, local_circles, local_props, w, h, {.threads = 1});
    outcomes[c] = outcome_of(result, pos, w, h);
  }
  return outcomes;
}

std::array<CandidateOutcome, kGroupSize> CandidateEvaluator::evaluate_reference(
    const CandidateGroup& group) const {
  const std::size_t k = group.index;
  if (k >= initial_.size()) throw Error(ErrorKind::InvalidArgument, "group index out of range");
  std::array<CandidateOutcome, kGroupSize> outcomes;
  std::vector<Point2D> prompts = initial_;
  for (std::size_t c = 0; c < kGroupSize; ++c) {
    prompts[k] = group.candidates[c];
    const DpmoResult result =
        run_dpmo(prompts, scene_, segmenter_, params_, seed_, {.threads = 1});
    outcomes[c] = outcome_of(result, k, scene_.width, scene_.height);
  }
  return outcomes;
}

std::array<FeatureVector, kGroupSize> candidate_features(
    const CandidateGroup& group, std::span<const Point2D> initial,
    const std::array<CandidateOutcome, kGroupSize>& outcomes) {
  Point2D centroid;
  for (const auto& p : group.candidates) {
    centroid.x += p.x;
    centroid.y += p.y;
  }
  centroid.x /= static_cast<double>(kGroupSize);
  centroid.y /= static_cast<double>(kGroupSize);

  std::array<FeatureVector, kGroupSize> out;
  for (std::size_t c = 0; c < kGroupSize; ++c) {
    const Point2D& p = group.candidates[c];
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < initial.size(); ++j) {
      if (j != group.index) nearest = std::min(nearest, squared_distance(p, initial[j]));
    }
    // A lone group has no neighbor; use 0 so the feature stays finite.
    nearest = std::isinf(nearest) ? 0.0 : std::sqrt(nearest);
    const auto& o = outcomes[c];
    const double fill = o.circle_population > 0.0
                            ? static_cast<double>(o.mask.population()) / o.circle_population
                            : 0.0;
    out[c] = {p.x - centroid.x, p.y - centroid.y, nearest, fill, o.fallback ? 1.0 : 0.0};
  }
  return out;
}

void compute_rewards(CandidateGroup& group, const Scene& scene,
                     const std::array<CandidateOutcome, kGroupSize>& outcomes) {
  if (!scene.gt_masks) throw Error(ErrorKind::MissingGroundTruth, "rewards need gt masks");
  if (group.index >= scene.gt_masks->size()) {
    throw Error(ErrorKind::MissingGroundTruth, "no gt mask for group " +
                                                   std::to_string(group.index));
  }
  const RasterMask& gt = (*scene.gt_masks)[group.index];
  for (std::size_t c = 0; c < kGroupSize; ++c) group.rewards[c] = iou(outcomes[c].mask, gt);
  group.best = select_by_reward(group);
}

void score_groups(std::vector<CandidateGroup>& groups, const CandidateEvaluator& evaluator,
                  const Scene& scene, bool with_rewards) {
  if (with_rewards && !scene.gt_masks) {
    throw Error(ErrorKind::MissingGroundTruth, "rewards need gt masks");
  }
  const auto n = static_cast<std::int64_t>(groups.size());
  std::vector<std::exception_ptr> errors(groups.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      auto& g = groups[i];
      const auto outcomes = evaluator.evaluate(g);
      g.features = candidate_features(g, evaluator.initial(), outcomes);
      if (with_rewards) compute_rewards(g, scene, outcomes);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double grpo_loss(std::span<const double> logits, std::size_t y) {
  if (logits.size() != kGroupSize || y >= kGroupSize) {
    throw Error(ErrorKind::InvalidArgument, "GRPO loss needs 5 logits and y in [0,5)");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double s : logits) sum += std::exp(s - top);
  return -(logits[y] - top) + std::log(sum);
}

std::array<double, kGroupSize> grpo_loss_grad(std::span<const double> logits, std::size_t y) {
  if (logits.size() != kGroupSize || y >= kGroupSize) {
    throw Error(ErrorKind::InvalidArgument, "GRPO loss needs 5 logits and y in [0,5)");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::array<double, kGroupSize> g;
  double sum = 0.0;
  for (std::size_t c = 0; c < kGroupSize; ++c) {
    g[c] = std::exp(logits[c] - top);
    sum += g[c];
  }
  for (auto& v : g) v /= sum;
  g[y] -= 1.0;
  return g;
}

double grpo_loss_batch(std::span<const CandidateGroup> groups) {
  if (groups.empty()) return 0.0;
  double total = 0.0;
  for (const auto& g : groups) total += grpo_loss(g.logits, g.best);
  return total / static_cast<double>(groups.size());
}

double ScorerModel::score(const FeatureVector& f) const {
  double s = bias;
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    s += weights[k] * (f[k] - feature_mean[k]) / feature_scale[k];
  }
  return s;
}

void apply_scorer(CandidateGroup& group, const ScorerModel& model) {
  for (std::size_t c = 0; c < kGroupSize; ++c) group.logits[c] = model.score(group.features[c]);
}

TrainResult train_scorer(std::span<const CandidateGroup> groups, const TrainOptions& options) {
  if (groups.empty()) throw Error(ErrorKind::EmptyTrainingSet, "no training groups");
  if (options.epochs < 0 || !(options.lr >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "epochs and lr must be non-negative");
  }
  TrainResult result;
  ScorerModel& model = result.model;

  // Standardize over every candidate in the training set.
  const double count = static_cast<double>(groups.size() * kGroupSize);
  for (const auto& g : groups) {
    for (const auto& f : g.features) {
      for (std::size_t k = 0; k < kFeatureCount; ++k) model.feature_mean[k] += f[k];
    }
  }
  for (auto& m : model.feature_mean) m /= count;
  FeatureVector var{};
  for (const auto& g : groups) {
    for (const auto& f : g.features) {
      for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const double d = f[k] - model.feature_mean[k];
        var[k] += d * d;
      }
    }
  }
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const double sd = std::sqrt(var[k] / count);
    model.feature_scale[k] = sd > 1e-12 ? sd : 1.0;
  }

  Rng rng(options.seed);
  for (auto& w : model.weights) w = rng.next_gaussian(0.0, options.init_scale);

  std::vector<CandidateGroup> work(groups.begin(), groups.end());
  const double n = static_cast<double>(work.size());
  for (int epoch = 0; epoch <= options.epochs; ++epoch) {
    FeatureVector grad_w{};
    double grad_b = 0.0;
    double loss = 0.0;
    for (auto& g : work) {
      apply_scorer(g, model);
      loss += grpo_loss(g.logits, g.best);
      const auto gl = grpo_loss_grad(g.logits, g.best);
      for (std::size_t c = 0; c < kGroupSize; ++c) {
        grad_b += gl[c];
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
          grad_w[k] += gl[c] * (g.features[c][k] - model.feature_mean[k]) / model.feature_scale[k];
        }
      }
    }
    result.loss_history.push_back(loss / n);
    if (epoch == options.epochs) break;
    for (std::size_t k = 0; k < kFeatureCount; ++k) model.weights[k] -= options.lr * grad_w[k] / n;
    model.bias -= options.lr * grad_b / n;
  }
  return result;
}

std::size_t select_index(const CandidateGroup& group, const ScorerModel& model) {
  std::size_t best = 0;
  double best_score = model.score(group.features[0]);
  for (std::size_t c = 1; c < kGroupSize; ++c) {
    const double s = model.score(group.features[c]);
    if (s > best_score) {
      best = c;
      best_score = s;
    }
  }
  return best;
}

Point2D select_point(const CandidateGroup& group, const ScorerModel& model) {
  return group.candidates[select_index(group, model)];
}

std::size_t select_by_reward(const CandidateGroup& group) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kGroupSize; ++c) {
    if (group.rewards[c] > group.rewards[best]) best = c;
  }
  return best;
}

std::string format_scorer(const ScorerModel& model) {
  nlohmann::ordered_json j = {{"weights", model.weights},
                              {"bias", model.bias},
                              {"feature_mean", model.feature_mean},
                              {"feature_scale", model.feature_scale}};
  return j.dump(2) + "\n";
}

ScorerModel parse_scorer(const std::string& text) {
  ScorerModel model;
  try {
    const auto j = nlohmann::json::parse(text);
    model.weights = j.at("weights").get<FeatureVector>();
    model.bias = j.at("bias").get<double>();
    if (j.contains("feature_mean")) model.feature_mean = j.at("feature_mean").get<FeatureVector>();
    if (j.contains("feature_scale")) {
      model.feature_scale = j.at("feature_scale").get<FeatureVector>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("scorer file: ") + e.what());
  }
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    if (!std::isfinite(model.weights[k]) || !std::isfinite(model.feature_mean[k]) ||
        !(model.feature_scale[k] > 0.0)) {
      throw Error(ErrorKind::ParseError, "scorer values must be finite with positive scales");
    }
  }
  if (!std::isfinite(model.bias)) throw Error(ErrorKind::ParseError, "scorer bias not finite");
  return model;
}

}  // namespace crowdmask
