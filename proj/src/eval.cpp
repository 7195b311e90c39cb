#include "crowdmask/eval.hpp"

#include <algorithm>
#include <cstdint>

#include <json.hpp>

#include "crowdmask/error.hpp"

namespace crowdmask {

namespace {

void check_shapes(std::span<const RasterMask> preds, std::span<const RasterMask> gts) {
  const RasterMask* first = !preds.empty() ? &preds.front() : (!gts.empty() ? &gts.front() : nullptr);
  if (!first) return;
  for (const auto* set : {&preds, &gts}) {
    for (const auto& m : *set) {
      if (!m.same_shape(*first)) throw Error(ErrorKind::SizeMismatch, "masks differ in size");
    }
  }
}

double ratio(std::size_t inter, std::size_t pa, std::size_t pb) {
  const std::size_t uni = pa + pb - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double iou(const RasterMask& a, const RasterMask& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::SizeMismatch, "masks differ in size");
  return ratio(intersection_count(a, b), a.population(), b.population());
}

CostMatrix iou_matrix_reference(std::span<const RasterMask> preds,
                                std::span<const RasterMask> gts) {
  check_shapes(preds, gts);
  CostMatrix out(preds.size(), gts.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) out.at(i, j) = iou(preds[i], gts[j]);
  }
  return out;
}

CostMatrix iou_matrix(std::span<const RasterMask> preds, std::span<const RasterMask> gts) {
  check_shapes(preds, gts);
  CostMatrix out(preds.size(), gts.size());
  std::vector<PixelBox> pb(preds.size()), gb(gts.size());
  for (std::size_t i = 0; i < preds.size(); ++i) pb[i] = preds[i].bounds();
  for (std::size_t j = 0; j < gts.size(); ++j) gb[j] = gts[j].bounds();
  const auto m = static_cast<std::int64_t>(preds.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (pb[i].intersect(gb[j]).empty()) continue;
      const std::size_t inter = intersection_count(preds[i], pb[i], gts[j], gb[j]);
      out.at(i, j) = ratio(inter, preds[i].population(), gts[j].population());
    }
  }
  return out;
}

Assignment hungarian_match(const CostMatrix& iou) {
  const std::size_t k = std::max(iou.rows, iou.cols);
  if (iou.rows == 0 || iou.cols == 0) return {};
  CostMatrix cost(k, k, 0.0);
  for (std::size_t i = 0; i < iou.rows; ++i) {
    for (std::size_t j = 0; j < iou.cols; ++j) cost.at(i, j) = -iou.at(i, j);
  }
  Assignment pairs;
  for (const auto& [i, j] : solve_assignment(cost)) {
    if (i < iou.rows && j < iou.cols) pairs.emplace_back(i, j);
  }
  return pairs;
}

ImageEvaluation evaluate_image(std::span<const RasterMask> preds, std::span<const RasterMask> gts,
                               double iou_threshold, std::string image_id) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "IoU threshold must lie in (0,1]");
  }
  ImageEvaluation ev;
  ev.image_id = std::move(image_id);
  const CostMatrix mat = iou_matrix(preds, gts);
  const Assignment pairs = hungarian_match(mat);
  double sum = 0.0;
  for (const auto& [i, j] : pairs) {
    const double v = mat.at(i, j);
    ev.matched_ious.push_back(v);
    sum += v;
    if (v >= iou_threshold) ++ev.confusion.tp;
  }
  ev.mean_iou = pairs.empty() ? 0.0 : sum / static_cast<double>(pairs.size());
  ev.confusion.fp = preds.size() - ev.confusion.tp;
  ev.confusion.fn = gts.size() - ev.confusion.tp;
  return ev;
}

double mean_matched_iou(std::span<const RasterMask> preds, std::span<const RasterMask> gts) {
  if (gts.empty()) throw Error(ErrorKind::EmptyGroundTruth, "no ground-truth masks");
  return evaluate_image(preds, gts).mean_iou;
}

ConfusionMatrix confusion(std::span<const RasterMask> preds, std::span<const RasterMask> gts,
                          double iou_threshold) {
  return evaluate_image(preds, gts, iou_threshold).confusion;
}

Scores prf1(const ConfusionMatrix& cm) {
  Scores s;
  const auto tp = static_cast<double>(cm.tp);
  if (cm.tp + cm.fp > 0) s.precision = tp / static_cast<double>(cm.tp + cm.fp);
  if (cm.tp + cm.fn > 0) s.recall = tp / static_cast<double>(cm.tp + cm.fn);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * (s.precision * s.recall) / (s.precision + s.recall);
  }
  return s;
}

EvalReport aggregate(std::vector<ImageEvaluation> images) {
  EvalReport report;
  double sum = 0.0;
  for (const auto& ev : images) {
    sum += ev.mean_iou;
    report.confusion += ev.confusion;
  }
  report.iou = images.empty() ? 0.0 : sum / static_cast<double>(images.size());
  report.scores = prf1(report.confusion);
  report.per_image = std::move(images);
  return report;
}

std::string format_report(const EvalReport& report) {
  using nlohmann::ordered_json;
  ordered_json per = ordered_json::array();
  for (const auto& ev : report.per_image) {
    const Scores s = prf1(ev.confusion);
    per.push_back({{"image_id", ev.image_id},
                   {"iou", ev.mean_iou},
                   {"tp", ev.confusion.tp},
                   {"fp", ev.confusion.fp},
                   {"fn", ev.confusion.fn},
                   {"precision", s.precision},
                   {"recall", s.recall},
                   {"f1", s.f1}});
  }
  ordered_json j = {{"iou", report.iou},
                    {"precision", report.scores.precision},
                    {"recall", report.scores.recall},
                    {"f1", report.scores.f1},
                    {"per_image", std::move(per)}};
  return j.dump(2) + "\n";
}

}  // namespace crowdmask
