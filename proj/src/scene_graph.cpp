#include "forge/scene_graph.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace forge {

const ObjectNode* SceneGraph::find(int64_t object_id) const {
  for (const ObjectNode& o : objects) {
    if (o.id == object_id) return &o;
  }
  return nullptr;
}

CategoryVocabulary::CategoryVocabulary(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.name < b.name;
  });
  for (size_t i = 0; i < entries_.size(); ++i) rank_[entries_[i].name] = static_cast<int>(i) + 1;
}

std::optional<int> CategoryVocabulary::rank_of(const std::string& category) const {
  auto it = rank_.find(category);
  if (it == rank_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> CategoryVocabulary::index_of(const std::string& category) const {
  auto r = rank_of(category);
  if (!r) return std::nullopt;
  return *r - 1;
}

std::string normalize_category(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

double relative_size(const BoundingBox& box, const ImageSize& img) {
  if (!img.valid()) throw DataError("relative_size: invalid image size");
  const double r = static_cast<double>(box.area()) / static_cast<double>(img.area());
  return std::clamp(r, 0.0, 1.0);
}

CategoryVocabulary build_vocabulary(const std::vector<SceneGraph>& graphs,
                                    uint64_t min_frequency) {
  if (min_frequency < 1) throw DataError("build_vocabulary: min_frequency must be >= 1");
  std::map<std::string, uint64_t> freq;
  for (const SceneGraph& g : graphs) {
    for (const ObjectNode& o : g.objects) {
      for (const std::string& name : o.names) ++freq[name];
    }
  }
  std::vector<CategoryVocabulary::Entry> entries;
  for (const auto& [name, n] : freq) {
    if (n >= min_frequency) entries.push_back({name, n});
  }
  return CategoryVocabulary(std::move(entries));
}

}  // namespace forge
