#include "forge/qc.hpp"

#include <algorithm>

namespace forge {

double agreement(const RleMask& annotation, const std::vector<BoundingBox>& graph_boxes,
                 const ImageSize& img, double iou_coefficient) {
  const uint64_t ann_area = annotation.area();
  if (ann_area == 0) return 0.0;
  if (graph_boxes.empty()) throw DataError("agreement: no graph boxes for task");

  std::vector<RleMask> box_masks;
  box_masks.reserve(graph_boxes.size());
  for (const BoundingBox& b : graph_boxes) box_masks.push_back(rasterize_box(b, img));
  const RleMask boxes_union = mask_union(box_masks);

  const auto [inter, uni] = mask_intersection_union(annotation, boxes_union);
  const double iop = static_cast<double>(inter) / static_cast<double>(ann_area);
  const double iou = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  return iop + iou_coefficient * iou;
}

double worker_threshold(int n_annotations, const QcParams& params) {
  if (n_annotations < 0) throw DataError("worker_threshold: negative annotation count");
  return std::max(params.threshold_floor,
                  params.threshold_base - params.threshold_slope * n_annotations);
}

TrustReport verify_workers(const std::vector<WorkerRecord>& records, const QcParams& params) {
  TrustReport report;
  for (const WorkerRecord& rec : records) {
    WorkerVerdict v;
    v.worker_id = rec.worker_id;
    v.annotation_count = static_cast<int>(rec.agreement_scores.size());
    double sum = 0.0;
    for (double s : rec.agreement_scores) sum += s;
    v.mean_agreement = v.annotation_count > 0 ? sum / v.annotation_count : 0.0;
    v.threshold = worker_threshold(v.annotation_count, params);
    if (v.annotation_count < params.min_annotations) {
      v.ignored = true;
      report.annotations_ignored += v.annotation_count;
    } else if (v.mean_agreement >= v.threshold) {
      v.trusted = true;
      report.annotations_kept += v.annotation_count;
    } else {
      report.annotations_removed += v.annotation_count;
    }
    report.workers.push_back(std::move(v));
  }
  return report;
}

std::optional<size_t> dedup_pick(size_t n_annotations, uint64_t task_seed) {
  if (n_annotations == 0) return std::nullopt;
  Rng rng(task_seed);
  return static_cast<size_t>(rng.uniform_int(n_annotations));
}

}  // namespace forge
