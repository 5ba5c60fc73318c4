#include "forge/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace forge {

int64_t box_intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const int64_t iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const int64_t ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0 || ih <= 0) return 0;
  return iw * ih;
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const int64_t inter = box_intersection_area(a, b);
  const int64_t uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BoundingBox clamp_box(const BoundingBox& b, const ImageSize& img) {
  const int64_t x0 = std::clamp<int64_t>(b.x, 0, img.width);
  const int64_t y0 = std::clamp<int64_t>(b.y, 0, img.height);
  const int64_t x1 = std::clamp<int64_t>(b.right(), x0, img.width);
  const int64_t y1 = std::clamp<int64_t>(b.bottom(), y0, img.height);
  return {x0, y0, x1 - x0, y1 - y0};
}

void PolygonRegion::validate() const {
  if (image_w <= 0 || image_h <= 0) throw DataError("polygon: invalid image size");
  for (const auto& ring : rings) {
    if (ring.size() < 3) throw DataError("polygon: ring with fewer than 3 vertices");
    for (const Point& p : ring) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw DataError("polygon: non-finite vertex");
    }
  }
}

uint64_t Bitmap::area() const {
  uint64_t n = 0;
  for (uint8_t v : px) n += v != 0;
  return n;
}

void RleMask::validate() const {
  if (width <= 0 || height <= 0) throw DataError("rle: invalid size");
  if (counts.empty()) throw DataError("rle: empty counts");
  uint64_t total = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0 && i != 0) throw DataError("rle: zero-length run");
    total += counts[i];
  }
  if (total != static_cast<uint64_t>(width) * height)
    throw DataError("rle: counts do not sum to width*height");
}

uint64_t RleMask::area() const {
  uint64_t n = 0;
  for (size_t i = 1; i < counts.size(); i += 2) n += counts[i];
  return n;
}

RleMask rle_encode(const Bitmap& bm) {
  RleMask m;
  m.width = bm.width;
  m.height = bm.height;
  uint64_t run = 0;
  uint8_t cur = 0;  // runs start with background
  for (uint8_t v : bm.px) {
    const uint8_t bit = v != 0;
    if (bit != cur) {
      m.counts.push_back(run);
      run = 0;
      cur = bit;
    }
    ++run;
  }
  m.counts.push_back(run);
  return m;
}

Bitmap rle_decode(const RleMask& m) {
  m.validate();
  Bitmap bm(m.width, m.height);
  size_t pos = 0;
  uint8_t cur = 0;
  for (uint64_t c : m.counts) {
    for (uint64_t i = 0; i < c; ++i) bm.px[pos++] = cur;
    cur = !cur;
  }
  return bm;
}

uint64_t mask_area(const RleMask& m) { return m.area(); }

std::pair<uint64_t, uint64_t> mask_intersection_union(const RleMask& a, const RleMask& b) {
  if (a.width != b.width || a.height != b.height)
    throw DataError("mask size mismatch: " + std::to_string(a.width) + "x" +
                    std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                    std::to_string(b.height));
  a.validate();
  b.validate();
  uint64_t inter = 0, uni = 0;
  size_t ia = 0, ib = 0;
  uint64_t ra = a.counts[0], rb = b.counts[0];
  bool va = false, vb = false;
  uint64_t remaining = static_cast<uint64_t>(a.width) * a.height;
  while (remaining > 0) {
    while (ra == 0 && ia + 1 < a.counts.size()) {
      ra = a.counts[++ia];
      va = !va;
    }
    while (rb == 0 && ib + 1 < b.counts.size()) {
      rb = b.counts[++ib];
      vb = !vb;
    }
    const uint64_t step = std::min({ra, rb, remaining});
    if (va && vb) inter += step;
    if (va || vb) uni += step;
    ra -= step;
    rb -= step;
    remaining -= step;
  }
  return {inter, uni};
}

double mask_iou(const RleMask& a, const RleMask& b) {
  const auto [inter, uni] = mask_intersection_union(a, b);
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

RleMask mask_union(std::span<const RleMask> masks) {
  if (masks.empty()) throw DataError("mask_union: empty mask list");
  for (const RleMask& m : masks) {
    if (m.width != masks[0].width || m.height != masks[0].height)
      throw DataError("mask_union: size mismatch");
  }
  Bitmap acc = rle_decode(masks[0]);
  for (size_t k = 1; k < masks.size(); ++k) {
    const Bitmap bm = rle_decode(masks[k]);
    for (size_t i = 0; i < acc.px.size(); ++i) acc.px[i] |= bm.px[i];
  }
  return rle_encode(acc);
}

RleMask rasterize(const PolygonRegion& p) {
  p.validate();
  Bitmap bm(p.image_w, p.image_h);
  std::vector<double> crossings;
  for (int y = 0; y < p.image_h; ++y) {
    const double cy = y + 0.5;
    crossings.clear();
    for (const auto& ring : p.rings) {
      const size_t n = ring.size();
      for (size_t i = 0; i < n; ++i) {
        const Point& a = ring[i];
        const Point& b = ring[(i + 1) % n];
        if (detail::edge_straddles(a, b, cy))
          crossings.push_back(detail::edge_crossing_x(a, b, cy));
      }
    }
    if (crossings.empty()) continue;
    std::sort(crossings.begin(), crossings.end());
    for (int x = 0; x < p.image_w; ++x) {
      const double cx = x + 0.5;
      const auto first_right = std::upper_bound(crossings.begin(), crossings.end(), cx);
      const size_t n_right = static_cast<size_t>(crossings.end() - first_right);
      if (n_right & 1) bm.set(x, y, true);
    }
  }
  return rle_encode(bm);
}

RleMask rasterize_box(const BoundingBox& b, const ImageSize& img) {
  Bitmap bm(img.width, img.height);
  const BoundingBox c = clamp_box(b, img);
  for (int64_t x = c.x; x < c.right(); ++x)
    for (int64_t y = c.y; y < c.bottom(); ++y)
      bm.set(static_cast<int>(x), static_cast<int>(y), true);
  return rle_encode(bm);
}

BoundingBox mask_tight_box(const RleMask& m) {
  const Bitmap bm = rle_decode(m);
  int64_t x0 = m.width, y0 = m.height, x1 = -1, y1 = -1;
  for (int x = 0; x < m.width; ++x) {
    for (int y = 0; y < m.height; ++y) {
      if (!bm.at(x, y)) continue;
      x0 = std::min<int64_t>(x0, x);
      y0 = std::min<int64_t>(y0, y);
      x1 = std::max<int64_t>(x1, x);
      y1 = std::max<int64_t>(y1, y);
    }
  }
  if (x1 < 0) return {0, 0, 0, 0};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

RleMask resample_mask_nearest(const RleMask& m, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) throw DataError("resample: invalid target size");
  const Bitmap src = rle_decode(m);
  Bitmap dst(out_w, out_h);
  for (int x = 0; x < out_w; ++x) {
    const int sx = static_cast<int>(static_cast<int64_t>(x) * m.width / out_w);
    for (int y = 0; y < out_h; ++y) {
      const int sy = static_cast<int>(static_cast<int64_t>(y) * m.height / out_h);
      if (src.at(sx, sy)) dst.set(x, y, true);
    }
  }
  return rle_encode(dst);
}

}  // namespace forge
