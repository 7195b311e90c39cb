#pragma once

#include <span>
#include <string>
#include <vector>

#include "crowdmask/assignment.hpp"
#include "crowdmask/types.hpp"

namespace crowdmask {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// |a & b| / |a | b|; two empty masks give 0.
double iou(const RasterMask& a, const RasterMask& b);

// rows = preds, cols = gts. Bounding-box culled and OpenMP-parallel over rows.
CostMatrix iou_matrix(std::span<const RasterMask> preds, std::span<const RasterMask> gts);

// Full-frame serial computation kept as the reference.
CostMatrix iou_matrix_reference(std::span<const RasterMask> preds,
                                std::span<const RasterMask> gts);

// min(m,n) pairs maximizing total IoU; zero-IoU dummies pad to square.
Assignment hungarian_match(const CostMatrix& iou);

struct ImageEvaluation {
  std::string image_id;
  // Mean IoU over the Hungarian pairs (0 when there are no predictions).
  double mean_iou = 0.0;
  std::vector<double> matched_ious;
  ConfusionMatrix confusion;
};

ImageEvaluation evaluate_image(std::span<const RasterMask> preds, std::span<const RasterMask> gts,
                               double iou_threshold = 0.5, std::string image_id = {});

double mean_matched_iou(std::span<const RasterMask> preds, std::span<const RasterMask> gts);

ConfusionMatrix confusion(std::span<const RasterMask> preds, std::span<const RasterMask> gts,
                          double iou_threshold = 0.5);

Scores prf1(const ConfusionMatrix& cm);

// Dataset aggregate: IoU is the unweighted mean of per-image means; counts
// are summed before computing precision/recall/F1.
struct EvalReport {
  double iou = 0.0;
  Scores scores;
  ConfusionMatrix confusion;
  std::vector<ImageEvaluation> per_image;
};

EvalReport aggregate(std::vector<ImageEvaluation> images);

// {iou, precision, recall, f1, per_image:[{image_id, iou, tp, fp, fn,
// precision, recall, f1}]}
std::string format_report(const EvalReport& report);

}  // namespace crowdmask
