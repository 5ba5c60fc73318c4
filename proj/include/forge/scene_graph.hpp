#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "forge/geometry.hpp"

namespace forge {

struct Relationship {
  std::string predicate;
  int64_t object_id = 0;
};

struct ObjectNode {
  int64_t id = 0;
  BoundingBox box;
  std::vector<std::string> names;  // non-empty
  std::vector<std::string> attributes;
  std::vector<Relationship> relationships;
};

struct SceneGraph {
  int64_t image_id = 0;
  ImageSize image_size;
  std::vector<ObjectNode> objects;

  const ObjectNode* find(int64_t object_id) const;
};

/// Category strings ranked by descending training-set frequency,
/// lexicographic among ties. Ranks are 1-based.
class CategoryVocabulary {
 public:
  struct Entry {
    std::string name;
    uint64_t frequency = 0;
  };

  CategoryVocabulary() = default;
  explicit CategoryVocabulary(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  /// 1-based rank; nullopt for categories outside the vocabulary.
  std::optional<int> rank_of(const std::string& category) const;
  std::optional<int> index_of(const std::string& category) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> rank_;
};

/// lowercase, trim, collapse internal whitespace
std::string normalize_category(const std::string& raw);

/// r = box area / image area, clamped to [0, 1].
double relative_size(const BoundingBox& box, const ImageSize& img);

/// Count every name occurrence across all objects, keep categories with
/// frequency >= min_frequency, rank by descending frequency.
CategoryVocabulary build_vocabulary(const std::vector<SceneGraph>& graphs,
                                    uint64_t min_frequency);

}  // namespace forge
