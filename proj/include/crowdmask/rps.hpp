#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crowdmask/dpmo.hpp"

namespace crowdmask {

inline constexpr std::size_t kGroupSize = 5;
inline constexpr std::size_t kFeatureCount = 5;

using FeatureVector = std::array<double, kFeatureCount>;

// One individual: the initial prediction (candidate 0) plus four Gaussian
// samples around it.
struct CandidateGroup {
  std::size_t index = 0;
  std::array<Point2D, kGroupSize> candidates{};
  std::array<double, kGroupSize> rewards{};
  std::array<double, kGroupSize> logits{};
  std::array<FeatureVector, kGroupSize> features{};
  // argmax of rewards, ties to the lowest index.
  std::size_t best = 0;
};

std::array<Point2D, kGroupSize> sample_group(const Point2D& initial, double sigma, Rng& rng,
                                             int width, int height);

// Gaussian radius per density regime. A prediction whose nearest other
// prediction is closer than dense_distance samples with the dense sigma.
struct SamplingSigma {
  double sparse = 1.0;
  double dense = 1.0;
  double dense_distance = 10.0;
};

// Groups for every initial prediction; group i draws from its own stream.
std::vector<CandidateGroup> sample_groups(std::span<const Point2D> initial,
                                          const SamplingSigma& sigma, int width, int height,
                                          std::uint64_t seed);
std::vector<CandidateGroup> sample_groups(std::span<const Point2D> initial, double sigma,
                                          int width, int height, std::uint64_t seed);

// What DPMO does with one candidate substituted for prompt `index` while the
// other prompts stay at their initial predictions.
struct CandidateOutcome {
  RasterMask mask;
  double circle_population = 0.0;
  bool fallback = false;
};

// Runs DPMO once per candidate. The segmenter answers for the unchanged
// prompts are cached, and only prompts whose exclusion circles can reach the
// substituted prompt's circle take part in overlap resolution.
class CandidateEvaluator {
 public:
  CandidateEvaluator(std::span<const Point2D> initial, const Scene& scene,
                     const Segmenter& segmenter, const NnecParams& params, std::uint64_t seed);

  std::array<CandidateOutcome, kGroupSize> evaluate(const CandidateGroup& group) const;

  // Full run_dpmo per candidate. Matches evaluate() unless overlap
  // resolution leaves some far-away prompt empty.
  std::array<CandidateOutcome, kGroupSize> evaluate_reference(const CandidateGroup& group) const;

  std::span<const Point2D> initial() const { return initial_; }

 private:
  std::vector<Point2D> initial_;
  const Scene& scene_;
  const Segmenter& segmenter_;
  NnecParams params_;
  std::uint64_t seed_;
  std::vector<Proposal> base_proposals_;
};

// Per candidate: offset from the group centroid (x, y), distance to the
// nearest other group's initial point, DPMO mask population over circle
// population, and the fallback flag.
std::array<FeatureVector, kGroupSize> candidate_features(
    const CandidateGroup& group, std::span<const Point2D> initial,
    const std::array<CandidateOutcome, kGroupSize>& outcomes);

// Fills rewards (IoU against gt_masks[group.index]) and best.
void compute_rewards(CandidateGroup& group, const Scene& scene,
                     const std::array<CandidateOutcome, kGroupSize>& outcomes);

// Convenience: outcomes, features and rewards for every group.
void score_groups(std::vector<CandidateGroup>& groups, const CandidateEvaluator& evaluator,
                  const Scene& scene, bool with_rewards);

// -s_y + log sum_c exp(s_c), evaluated with the max subtracted.
double grpo_loss(std::span<const double> logits, std::size_t y);
// softmax(logits) - onehot(y)
std::array<double, kGroupSize> grpo_loss_grad(std::span<const double> logits, std::size_t y);
// Mean of grpo_loss over groups using their logits and best indices.
double grpo_loss_batch(std::span<const CandidateGroup> groups);

// Linear scorer over standardized features. The standardization is fitted on
// the training groups and frozen into the model.
struct ScorerModel {
  FeatureVector weights{};
  double bias = 0.0;
  FeatureVector feature_mean{};
  FeatureVector feature_scale{1.0, 1.0, 1.0, 1.0, 1.0};

  double score(const FeatureVector& f) const;
};

struct TrainOptions {
  double lr = 0.01;
  int epochs = 200;
  std::uint64_t seed = 0;
  // Standard deviation of the initial weights.
  double init_scale = 0.01;
};

struct TrainResult {
  ScorerModel model;
  // Mean GRPO loss before each epoch's update, plus the final loss.
  std::vector<double> loss_history;
};

TrainResult train_scorer(std::span<const CandidateGroup> groups, const TrainOptions& options);

// Writes model scores into group.logits.
void apply_scorer(CandidateGroup& group, const ScorerModel& model);

// Highest-scoring candidate, ties to the lowest index.
std::size_t select_index(const CandidateGroup& group, const ScorerModel& model);
Point2D select_point(const CandidateGroup& group, const ScorerModel& model);
// Selection by true reward (the reward oracle).
std::size_t select_by_reward(const CandidateGroup& group);

std::string format_scorer(const ScorerModel& model);
ScorerModel parse_scorer(const std::string& text);

}  // namespace crowdmask
