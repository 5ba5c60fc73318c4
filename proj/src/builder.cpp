#include "forge/builder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace forge {
namespace {

bool shares_name(const ObjectNode& a, const ObjectNode& b) {
  for (const std::string& n : a.names) {
    if (std::find(b.names.begin(), b.names.end(), n) != b.names.end()) return true;
  }
  return false;
}

/// All (predicate, supporting-category-name) descriptions of an object,
/// expanded over every name of each supporting object.
std::vector<RelationshipSlot> relation_descriptions(const SceneGraph& graph,
                                                    const ObjectNode& o) {
  std::vector<RelationshipSlot> out;
  for (const Relationship& rel : o.relationships) {
    const ObjectNode* support = graph.find(rel.object_id);
    if (!support) continue;
    for (const std::string& sname : support->names) {
      RelationshipSlot d{rel.predicate, sname};
      if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    }
  }
  return out;
}

std::string join_tags(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

}  // namespace

double sample_weight(double r, double weight_cap) {
  return std::sqrt(std::min(weight_cap, r));
}

std::vector<int64_t> sample_boxes(const SceneGraph& graph, const SamplerParams& params) {
  // Pool construction in input order: r-bounds first, then pairwise overlap.
  std::vector<const ObjectNode*> pool;
  for (const ObjectNode& o : graph.objects) {
    const double r = relative_size(o.box, graph.image_size);
    if (r < params.r_min || r > params.r_max) continue;
    bool overlaps = false;
    for (const ObjectNode* member : pool) {
      if (box_iou(o.box, member->box) > params.overlap_iou) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) pool.push_back(&o);
  }

  std::vector<double> weights(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    const double r = relative_size(pool[i]->box, graph.image_size);
    weights[i] = sample_weight(r, params.weight_cap);
  }

  Rng rng(params.rng_seed);
  std::vector<int64_t> sampled;
  std::vector<bool> taken(pool.size(), false);
  const size_t n_draws = std::min<size_t>(pool.size(), params.boxes_per_image_target);
  for (size_t d = 0; d < n_draws; ++d) {
    std::vector<double> remaining(pool.size(), 0.0);
    for (size_t i = 0; i < pool.size(); ++i) {
      if (!taken[i]) remaining[i] = weights[i];
    }
    const size_t pick = rng.categorical(remaining);
    taken[pick] = true;
    sampled.push_back(pool[pick]->id);
    for (size_t i = 0; i < pool.size(); ++i) {
      if (!taken[i] && shares_name(*pool[i], *pool[pick]))
        weights[i] /= params.category_penalty;
    }
  }
  return sampled;
}

std::string render_phrase(const PhraseStructure& s) {
  std::vector<std::string> parts = s.attributes;
  parts.push_back(s.category);
  if (s.relationship) {
    parts.push_back(s.relationship->predicate);
    parts.push_back(s.relationship->supporting_category);
  }
  std::string joined = join_tags(parts);
  for (char& c : joined) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return joined;
}

PhraseTask generate_phrase(const SceneGraph& graph, int64_t target_id, Rng& rng) {
  const ObjectNode* target = graph.find(target_id);
  if (!target) throw DataError("generate_phrase: unknown target id " + std::to_string(target_id));
  if (target->names.empty()) throw DataError("generate_phrase: target has no names");

  PhraseTask task;
  task.image_id = graph.image_id;
  task.source_box_id = target_id;
  task.task_id = std::to_string(graph.image_id) + "-" + std::to_string(target_id);

  std::vector<const ObjectNode*> others;
  for (const ObjectNode& o : graph.objects) {
    if (o.id != target_id) others.push_back(&o);
  }

  // Heuristic 1: a name no other box carries.
  std::vector<std::string> unique_names;
  for (const std::string& n : target->names) {
    bool elsewhere = false;
    for (const ObjectNode* o : others) {
      if (std::find(o->names.begin(), o->names.end(), n) != o->names.end()) {
        elsewhere = true;
        break;
      }
    }
    if (!elsewhere) unique_names.push_back(n);
  }

  if (!unique_names.empty()) {
    task.structure.category = unique_names.front();
    // Tack on one randomly sampled attribute or relationship, if the box
    // has any.
    const auto rels = relation_descriptions(graph, *target);
    const size_t n_mod = target->attributes.size() + rels.size();
    if (n_mod > 0) {
      const size_t pick = rng.uniform_int(n_mod);
      if (pick < target->attributes.size()) {
        task.structure.attributes = {target->attributes[pick]};
      } else {
        task.structure.relationship = rels[pick - target->attributes.size()];
      }
    }
    task.subset_tags.insert("cat+");
  } else {
    std::vector<const ObjectNode*> same_category;
    for (const ObjectNode* o : others) {
      if (shares_name(*target, *o)) same_category.push_back(o);
    }

    // Heuristic 2: an attribute no same-category box carries.
    std::vector<std::string> unique_attrs;
    for (const std::string& a : target->attributes) {
      bool elsewhere = false;
      for (const ObjectNode* o : same_category) {
        if (std::find(o->attributes.begin(), o->attributes.end(), a) != o->attributes.end()) {
          elsewhere = true;
          break;
        }
      }
      if (!elsewhere && std::find(unique_attrs.begin(), unique_attrs.end(), a) == unique_attrs.end())
        unique_attrs.push_back(a);
    }

    if (!unique_attrs.empty()) {
      task.structure.category = target->names.front();
      task.structure.attributes = {unique_attrs[rng.uniform_int(unique_attrs.size())]};
      task.subset_tags.insert("att+");
    } else {
      // Heuristic 3: a relationship description no same-category box carries.
      const auto target_rels = relation_descriptions(graph, *target);
      std::vector<RelationshipSlot> unique_rels;
      for (const RelationshipSlot& d : target_rels) {
        bool elsewhere = false;
        for (const ObjectNode* o : same_category) {
          const auto other_rels = relation_descriptions(graph, *o);
          if (std::find(other_rels.begin(), other_rels.end(), d) != other_rels.end()) {
            elsewhere = true;
            break;
          }
        }
        if (!elsewhere) unique_rels.push_back(d);
      }

      if (!unique_rels.empty()) {
        task.structure.category = target->names.front();
        task.structure.relationship = unique_rels[rng.uniform_int(unique_rels.size())];
        task.subset_tags.insert("rel+");
      } else {
        // Heuristic 4: everything we have, under a randomly chosen name.
        task.structure.category = target->names[rng.uniform_int(target->names.size())];
        task.structure.attributes = target->attributes;
        if (!target_rels.empty()) task.structure.relationship = target_rels.front();
      }
    }
  }

  task.phrase = render_phrase(task.structure);
  if (!task.structure.attributes.empty()) task.subset_tags.insert("att");
  if (task.structure.relationship) task.subset_tags.insert("rel");
  return task;
}

bool is_plural_word(const std::string& category) {
  std::string last = category;
  const size_t pos = last.find_last_of(' ');
  if (pos != std::string::npos) last = last.substr(pos + 1);
  if (last.size() < 2 || last.back() != 's') return false;
  if (last.size() >= 2 && last[last.size() - 2] == 's') return false;  // "glass", "dress"
  static const std::set<std::string> irregular_singular = {"bus", "gas", "lens", "iris",
                                                           "chassis", "cactus"};
  return !irregular_singular.contains(last);
}

bool is_plural_phrase(const PhraseStructure& s) {
  if (is_plural_word(s.category)) return true;
  static const std::set<std::string> markers = {"two",  "three",   "four",    "five",
                                                "six",  "many",    "several", "multiple",
                                                "some", "numerous"};
  for (const std::string& a : s.attributes) {
    if (markers.contains(a)) return true;
  }
  return false;
}

namespace {

struct WorkMask {
  RleMask mask;
  uint64_t area = 0;
};

BoundingBox joint_tight_box(const RleMask& a, const RleMask& b) {
  const BoundingBox ba = mask_tight_box(a);
  const BoundingBox bb = mask_tight_box(b);
  if (ba.area() == 0) return bb;
  if (bb.area() == 0) return ba;
  const int64_t x0 = std::min(ba.x, bb.x);
  const int64_t y0 = std::min(ba.y, bb.y);
  const int64_t x1 = std::max(ba.right(), bb.right());
  const int64_t y1 = std::max(ba.bottom(), bb.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

WorkMask merged(const WorkMask& a, const WorkMask& b) {
  const RleMask masks[2] = {a.mask, b.mask};
  WorkMask out;
  out.mask = mask_union(masks);
  out.area = out.mask.area();
  return out;
}

}  // namespace

InstanceSet refine_instances(const std::vector<PolygonRegion>& polygons,
                             const PhraseTask& task,
                             const std::vector<CategorizedBox>& graph_boxes,
                             const RefineThresholds& thresholds) {
  InstanceSet result;
  std::vector<WorkMask> work;
  for (size_t i = 0; i < polygons.size(); ++i) {
    WorkMask wm;
    wm.mask = rasterize(polygons[i]);
    wm.area = wm.mask.area();
    if (wm.area == 0) {
      result.provenance.push_back("drop: polygon " + std::to_string(i) + " rasterized empty");
      continue;
    }
    work.push_back(std::move(wm));
  }

  // Pass A: occlusion fragments whose joint bbox matches a non-plural graph box.
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < work.size() && !changed; ++i) {
      for (size_t j = i + 1; j < work.size() && !changed; ++j) {
        const BoundingBox joint = joint_tight_box(work[i].mask, work[j].mask);
        for (size_t k = 0; k < graph_boxes.size(); ++k) {
          if (is_plural_word(graph_boxes[k].category)) continue;
          if (box_iou(joint, graph_boxes[k].box) >= thresholds.merge_bbox_iou) {
            work[i] = merged(work[i], work[j]);
            work.erase(work.begin() + j);
            result.provenance.push_back("merge-box: " + std::to_string(i) + "+" +
                                        std::to_string(j) + " via graph box " +
                                        std::to_string(k));
            changed = true;
            break;
          }
        }
      }
    }
  }

  // Pass B: overlapping fragments (accidental polygon restarts).
  changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < work.size() && !changed; ++i) {
      for (size_t j = i + 1; j < work.size() && !changed; ++j) {
        const auto [inter, uni] = mask_intersection_union(work[i].mask, work[j].mask);
        if (inter == 0) continue;
        const uint64_t small = std::min(work[i].area, work[j].area);
        const uint64_t large = std::max(work[i].area, work[j].area);
        const double iou = static_cast<double>(inter) / static_cast<double>(uni);
        if (static_cast<double>(small) <= thresholds.merge_small_ratio * static_cast<double>(large) ||
            iou >= thresholds.merge_mask_iou) {
          work[i] = merged(work[i], work[j]);
          work.erase(work.begin() + j);
          result.provenance.push_back("merge-overlap: " + std::to_string(i) + "+" +
                                      std::to_string(j));
          changed = true;
        }
      }
    }
  }

  // Pass C: split plural-phrase polygons covering several similar-size boxes.
  const bool plural = is_plural_phrase(task.structure);
  for (const WorkMask& wm : work) {
    std::vector<size_t> covered;
    if (plural) {
      for (size_t k = 0; k < graph_boxes.size(); ++k) {
        const BoundingBox& gb = graph_boxes[k].box;
        if (gb.area() <= 0) continue;
        const RleMask box_mask = rasterize_box(gb, wm.mask.size());
        const auto [inter, uni] = mask_intersection_union(wm.mask, box_mask);
        (void)uni;
        if (static_cast<double>(inter) >=
            thresholds.split_coverage * static_cast<double>(gb.area()))
          covered.push_back(k);
      }
    }
    bool similar_sizes = covered.size() >= 2;
    if (similar_sizes) {
      int64_t min_area = graph_boxes[covered.front()].box.area();
      int64_t max_area = min_area;
      for (size_t k : covered) {
        min_area = std::min(min_area, graph_boxes[k].box.area());
        max_area = std::max(max_area, graph_boxes[k].box.area());
      }
      similar_sizes = static_cast<double>(max_area) <=
                      thresholds.split_area_ratio * static_cast<double>(min_area);
    }

    if (!similar_sizes) {
      result.instances.push_back({wm.mask, mask_tight_box(wm.mask)});
      continue;
    }

    // Assign every foreground pixel to the nearest covering box center.
    const Bitmap src = rle_decode(wm.mask);
    std::vector<Bitmap> parts(covered.size(), Bitmap(wm.mask.width, wm.mask.height));
    for (int x = 0; x < wm.mask.width; ++x) {
      for (int y = 0; y < wm.mask.height; ++y) {
        if (!src.at(x, y)) continue;
        const double px = x + 0.5, py = y + 0.5;
        size_t best = 0;
        double best_d2 = 0.0;
        for (size_t c = 0; c < covered.size(); ++c) {
          const BoundingBox& gb = graph_boxes[covered[c]].box;
          const double cx = static_cast<double>(gb.x) + static_cast<double>(gb.w) / 2.0;
          const double cy = static_cast<double>(gb.y) + static_cast<double>(gb.h) / 2.0;
          const double d2 = (px - cx) * (px - cx) + (py - cy) * (py - cy);
          if (c == 0 || d2 < best_d2) {
            best = c;
            best_d2 = d2;
          }
        }
        parts[best].set(x, y, true);
      }
    }
    size_t emitted = 0;
    for (const Bitmap& part : parts) {
      const RleMask pm = rle_encode(part);
      if (pm.area() == 0) continue;
      result.instances.push_back({pm, mask_tight_box(pm)});
      ++emitted;
    }
    result.provenance.push_back("split: 1 polygon -> " + std::to_string(emitted) +
                                " instances over " + std::to_string(covered.size()) +
                                " graph boxes");
  }
  return result;
}

void assign_subsets(PhraseTask& task, const CategoryVocabulary& vocab,
                    const std::set<std::string>& stuff_categories,
                    const SubsetParams& params) {
  if (task.target_instances.empty())
    throw DataError("assign_subsets: task " + task.task_id + " has no target instances");

  std::vector<RleMask> masks;
  for (const TaskInstance& inst : task.target_instances) masks.push_back(inst.mask);
  const RleMask u = mask_union(masks);
  const double frac = static_cast<double>(u.area()) /
                      static_cast<double>(static_cast<uint64_t>(u.width) * u.height);
  if (frac < params.small_cut)
    task.subset_tags.insert("small");
  else if (frac > params.large_cut)
    task.subset_tags.insert("large");
  else
    task.subset_tags.insert("mid");

  const size_t n = task.target_instances.size();
  if (n == 1)
    task.subset_tags.insert("single");
  else if (n < static_cast<size_t>(params.multi_many_cut))
    task.subset_tags.insert("multi");
  else
    task.subset_tags.insert("many");

  const auto rank = vocab.rank_of(task.structure.category);
  if (rank && *rank <= params.freq_cut_1)
    task.subset_tags.insert("freq_1_100");
  else if (rank && *rank <= params.freq_cut_2)
    task.subset_tags.insert("freq_101_500");
  else
    task.subset_tags.insert("freq_500+");

  task.subset_tags.insert(stuff_categories.contains(task.structure.category) ? "stuff" : "obj");
}

std::vector<const ObjectNode*> matching_boxes(const SceneGraph& graph,
                                              const PhraseStructure& s) {
  std::vector<const ObjectNode*> out;
  for (const ObjectNode& o : graph.objects) {
    if (std::find(o.names.begin(), o.names.end(), s.category) == o.names.end()) continue;
    bool ok = true;
    for (const std::string& a : s.attributes) {
      if (std::find(o.attributes.begin(), o.attributes.end(), a) == o.attributes.end()) {
        ok = false;
        break;
      }
    }
    if (ok && s.relationship) {
      const auto rels = relation_descriptions(graph, o);
      ok = std::find(rels.begin(), rels.end(), *s.relationship) != rels.end();
    }
    if (ok) out.push_back(&o);
  }
  return out;
}

}  // namespace forge
