#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/geometry.hpp"
#include "forge/rng.hpp"

namespace forge {

struct QcParams {
  double iou_coefficient = 0.8;   // agreement = IoP + coefficient * IoU
  double threshold_floor = 0.7;   // thresh = max(floor, base - slope * n)
  double threshold_base = 0.95;
  double threshold_slope = 0.05;
  int min_annotations = 10;       // workers below this are ignored
};

struct WorkerAnnotation {
  std::string task_id;
  RleMask mask;  // rasterized union of the worker's polygons for the task
};

struct WorkerRecord {
  std::string worker_id;
  std::vector<WorkerAnnotation> annotations;
  std::vector<double> agreement_scores;  // one per annotation, in [0, 1.8]
};

struct WorkerVerdict {
  std::string worker_id;
  int annotation_count = 0;
  double mean_agreement = 0.0;
  double threshold = 0.0;
  bool trusted = false;
  bool ignored = false;  // fewer than min_annotations
};

struct TrustReport {
  std::vector<WorkerVerdict> workers;
  uint64_t annotations_kept = 0;
  uint64_t annotations_removed = 0;  // removed by score, trusted workers aside
  uint64_t annotations_ignored = 0;  // from low-count workers
};

/// agreement = IoP + coefficient * IoU between the annotation mask and the
/// rasterized union of the task's graph boxes. Empty annotations score 0.
double agreement(const RleMask& annotation, const std::vector<BoundingBox>& graph_boxes,
                 const ImageSize& img, double iou_coefficient = 0.8);

/// thresh = max(floor, base - slope * n_annotations)
double worker_threshold(int n_annotations, const QcParams& params = {});

/// Workers with fewer than min_annotations are ignored; the rest are trusted
/// iff their mean agreement reaches the count-dependent threshold
/// (boundary inclusive).
TrustReport verify_workers(const std::vector<WorkerRecord>& records,
                           const QcParams& params = {});

/// Uniform pick among surviving annotations of one task; deterministic under
/// the task seed. Returns nullopt (task dropped) when the list is empty.
std::optional<size_t> dedup_pick(size_t n_annotations, uint64_t task_seed);

}  // namespace forge
