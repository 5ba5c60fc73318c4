#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

struct ImageSize {
  int width = 0;
  int height = 0;

  bool valid() const { return width > 0 && height > 0; }
  int64_t area() const { return static_cast<int64_t>(width) * height; }
  bool operator==(const ImageSize&) const = default;
};

/// Integer pixel box covering the half-open span [x, x+w) x [y, y+h).
struct BoundingBox {
  int64_t x = 0;
  int64_t y = 0;
  int64_t w = 0;
  int64_t h = 0;

  int64_t area() const { return w * h; }
  int64_t right() const { return x + w; }
  int64_t bottom() const { return y + h; }
  bool operator==(const BoundingBox&) const = default;
};

int64_t box_intersection_area(const BoundingBox& a, const BoundingBox& b);

/// |a∩b| / |a∪b| over pixel footprints; 0 when both areas are 0.
double box_iou(const BoundingBox& a, const BoundingBox& b);

/// Clamp a box to image bounds. Never applied implicitly.
BoundingBox clamp_box(const BoundingBox& b, const ImageSize& img);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Closed polygon (possibly multiple rings) in continuous pixel coordinates.
struct PolygonRegion {
  std::vector<std::vector<Point>> rings;
  int image_w = 0;
  int image_h = 0;

  /// Throws DataError on rings with < 3 vertices or non-finite coordinates.
  void validate() const;
};

/// Dense binary mask in column-major order (column 0 top to bottom, then
/// column 1, ...). Pixel (x, y) lives at index x * height + y.
struct Bitmap {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> px;

  Bitmap() = default;
  Bitmap(int w, int h) : width(w), height(h), px(static_cast<size_t>(w) * h, 0) {}

  size_t index(int x, int y) const { return static_cast<size_t>(x) * height + y; }
  bool at(int x, int y) const { return px[index(x, y)] != 0; }
  void set(int x, int y, bool v) { px[index(x, y)] = v ? 1 : 0; }
  uint64_t area() const;
};

/// Run-length mask over the column-major pixel order. Runs alternate
/// background/foreground starting with a background run; only the first run
/// may be zero-length; run lengths sum to width * height.
struct RleMask {
  int width = 0;
  int height = 0;
  std::vector<uint64_t> counts;

  /// Throws DataError when the run-length invariants are violated.
  void validate() const;
  uint64_t area() const;
  bool empty() const { return area() == 0; }
  ImageSize size() const { return {width, height}; }
  bool operator==(const RleMask&) const = default;
};

RleMask rle_encode(const Bitmap& bm);
Bitmap rle_decode(const RleMask& m);

/// Foreground pixel count.
uint64_t mask_area(const RleMask& m);

/// Exact integer intersection and union areas. Sizes must match.
std::pair<uint64_t, uint64_t> mask_intersection_union(const RleMask& a, const RleMask& b);

/// |a∩b| / |a∪b|; 0 when both masks are empty. Sizes must match.
double mask_iou(const RleMask& a, const RleMask& b);

/// Pixelwise OR of all masks. Sizes must match; an empty list is an error.
RleMask mask_union(std::span<const RleMask> masks);

/// Even-odd fill: a pixel is foreground iff its center (x+0.5, y+0.5) has an
/// odd number of edge crossings to its right.
RleMask rasterize(const PolygonRegion& p);

/// Mask of the box footprint clipped to the image.
RleMask rasterize_box(const BoundingBox& b, const ImageSize& img);

/// Tight bounding box of the foreground; 0x0 box at origin when empty.
BoundingBox mask_tight_box(const RleMask& m);

/// Nearest-neighbor resample to out_w x out_h (either direction).
RleMask resample_mask_nearest(const RleMask& m, int out_w, int out_h);

namespace detail {

/// Crossing abscissa of edge (a, b) with the horizontal line y = cy.
/// Shared with the test oracle so both sides round identically.
inline double edge_crossing_x(const Point& a, const Point& b, double cy) {
  return a.x + (cy - a.y) / (b.y - a.y) * (b.x - a.x);
}

/// True when the edge (a, b) straddles the scanline y = cy.
inline bool edge_straddles(const Point& a, const Point& b, double cy) {
  return (a.y > cy) != (b.y > cy);
}

}  // namespace detail

}  // namespace forge
