#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/geometry.hpp"
#include "forge/rng.hpp"
#include "forge/scene_graph.hpp"

namespace forge {

struct SamplerParams {
  double r_min = 0.02;
  double r_max = 0.9;
  double overlap_iou = 0.2;
  double weight_cap = 0.1;
  double category_penalty = 5.0;
  int boxes_per_image_target = 5;
  uint64_t rng_seed = 0;
};

/// Sampling weight for a box of relative size r: sqrt(min(weight_cap, r)).
double sample_weight(double r, double weight_cap = 0.1);

/// Stratified box sampling. Boxes outside [r_min, r_max] never enter the
/// pool; a box overlapping a pool member with IoU > overlap_iou is rejected;
/// draws are weighted without replacement, and every draw divides the weight
/// of same-category pool boxes by category_penalty.
std::vector<int64_t> sample_boxes(const SceneGraph& graph, const SamplerParams& params);

struct RelationshipSlot {
  std::string predicate;
  std::string supporting_category;
  bool operator==(const RelationshipSlot&) const = default;
  auto operator<=>(const RelationshipSlot&) const = default;
};

struct PhraseStructure {
  std::string category;
  std::vector<std::string> attributes;
  std::optional<RelationshipSlot> relationship;
};

struct TaskInstance {
  RleMask mask;
  BoundingBox box;
};

struct PhraseTask {
  std::string task_id;
  int64_t image_id = 0;
  std::string phrase;
  PhraseStructure structure;
  std::set<std::string> subset_tags;
  int64_t source_box_id = 0;
  std::vector<TaskInstance> target_instances;
};

/// "<attributes> <category> <predicate> <supporting category>",
/// single-space joined, lowercase.
std::string render_phrase(const PhraseStructure& s);

/// Discriminative phrase generation, heuristics applied in order:
///   1. a category name unique in the image  -> cat+
///   2. an attribute unique among same-category boxes -> att+
///   3. a relationship description unique among same-category boxes -> rel+
///   4. all attributes + random name + relationship (no discriminative tag)
/// att/rel presence tags are added whenever the rendered phrase carries one.
PhraseTask generate_phrase(const SceneGraph& graph, int64_t target_id, Rng& rng);

struct RefineThresholds {
  double merge_bbox_iou = 0.7;      // joint bbox vs graph box (merge pass A)
  double merge_small_ratio = 0.2;   // smaller area <= ratio * larger (merge pass B)
  double merge_mask_iou = 0.1;      // mask IoU trigger (merge pass B)
  double split_coverage = 0.8;      // mask covers this fraction of a graph box
  double split_area_ratio = 2.0;    // covered boxes within this area ratio
};

struct CategorizedBox {
  BoundingBox box;
  std::string category;
};

struct InstanceSet {
  std::vector<TaskInstance> instances;
  std::vector<std::string> provenance;  // merge/split audit records
};

/// Heuristic plurality test: last word ends in "s" (not "ss", not in a small
/// irregular list), or the phrase carries a numeric/plural attribute marker.
bool is_plural_word(const std::string& category);
bool is_plural_phrase(const PhraseStructure& s);

/// Polygon-to-instance refinement: merge occlusion fragments matching a
/// non-plural graph box, merge overlapping fragments, split plural-phrase
/// polygons covering several similar-size graph boxes.
InstanceSet refine_instances(const std::vector<PolygonRegion>& polygons,
                             const PhraseTask& task,
                             const std::vector<CategorizedBox>& graph_boxes,
                             const RefineThresholds& thresholds = {});

struct SubsetParams {
  double small_cut = 0.02;  // union area below this fraction of the image
  double large_cut = 0.2;   // union area above this fraction of the image
  int freq_cut_1 = 100;
  int freq_cut_2 = 500;
  int multi_many_cut = 5;   // "many" means at least this many instances
};

/// Adds size, instance-count, category-frequency and stuff/obj tags.
/// Requires target_instances to be populated.
void assign_subsets(PhraseTask& task, const CategoryVocabulary& vocab,
                    const std::set<std::string>& stuff_categories,
                    const SubsetParams& params = {});

/// Graph boxes whose annotations match every part of the phrase structure.
std::vector<const ObjectNode*> matching_boxes(const SceneGraph& graph,
                                              const PhraseStructure& s);

}  // namespace forge
