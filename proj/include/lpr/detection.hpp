#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lpr/contours.hpp"
#include "lpr/geometry.hpp"
#include "lpr/homography.hpp"
#include "lpr/morphology.hpp"
#include "lpr/raster.hpp"
#include "lpr/segmentation.hpp"
#include "lpr/threshold.hpp"

namespace lpr {

enum class DetectionMode { strict, permissive };

inline const char* to_string(DetectionMode m) {
  return m == DetectionMode::strict ? "strict" : "permissive";
}

struct DetectionConfig {
  int threshold_window = 11;
  double threshold_c = 2.0;
  // minimum bounding-rect area at the 1280x720 reference resolution;
  // scaled by the actual frame area on use
  double min_area_px = 500.0;
  int max_candidates = 30;
  double strict_aspect_min = 1.5;
  double strict_aspect_max = 4.0;
  double permissive_aspect_min = 1.2;
  double permissive_aspect_max = 5.0;
  int min_rect_h = 20;            // native plate size gate, pixels
  int min_rect_w = 60;
  int small_plate_rows = 80;      // below this, acceptance needs characters
  int warp_width = 400;           // rectified output width
  // verification thresholds (large plates)
  double verify_fill_min = 0.10;
  double verify_fill_max = 0.60;
  int verify_min_transitions = 3;
  double verify_min_std = 20.0;
  int mode_switch_misses = 30;    // consecutive misses before permissive
  SegmentationConfig segmentation;
};

// Plate quadrilateral in source-frame coordinates, corners ordered
// tl, tr, br, bl.
struct PlateQuad {
  std::array<Vec2, 4> corners;
  RotatedRect rect;  // fitted oriented rectangle, width >= height
};

struct Detection {
  PlateQuad quad;
  Raster rectified;  // fronto-parallel warp, warp_width wide
};

// Canonical corner order for an arbitrary convex quad: top-left minimizes
// x + y, bottom-right maximizes it, and of the remaining two the top-right
// minimizes y - x.
inline std::array<Vec2, 4> order_corners(std::array<Vec2, 4> pts) {
  std::array<Vec2, 4> out;
  int tl = 0, br = 0;
  for (int i = 1; i < 4; ++i) {
    if (pts[i].x + pts[i].y < pts[tl].x + pts[tl].y) tl = i;
    if (pts[i].x + pts[i].y > pts[br].x + pts[br].y) br = i;
  }
  std::vector<int> rest;
  for (int i = 0; i < 4; ++i)
    if (i != tl && i != br) rest.push_back(i);
  int tr = rest[0], bl = rest[1];
  if (pts[bl].y - pts[bl].x < pts[tr].y - pts[tr].x) std::swap(tr, bl);
  out[0] = pts[tl];
  out[1] = pts[tr];
  out[2] = pts[br];
  out[3] = pts[bl];
  return out;
}

// Plate-likeness check on a rectified candidate: Otsu ink fraction within
// band, enough dark/light alternations along the middle row, and enough
// intensity spread. All three must hold.
inline bool verify_plate_region(const Raster& rectified,
                                const DetectionConfig& cfg = {}) {
  if (rectified.empty())
    throw std::invalid_argument("verify_plate_region: empty image");

  const Raster bin = otsu_threshold(rectified, Polarity::dark_foreground).binary;
  std::size_t ink = 0;
  for (std::uint8_t v : bin.data) ink += v != 0;
  const double fill = static_cast<double>(ink) / bin.data.size();
  if (fill < cfg.verify_fill_min || fill > cfg.verify_fill_max) return false;

  const int mid = bin.height / 2;
  int transitions = 0;
  for (int x = 1; x < bin.width; ++x)
    transitions += (bin.at(x, mid) != 0) != (bin.at(x - 1, mid) != 0);
  if (transitions < cfg.verify_min_transitions) return false;

  double mean = 0.0;
  for (std::uint8_t v : rectified.data) mean += v;
  mean /= static_cast<double>(rectified.data.size());
  double var = 0.0;
  for (std::uint8_t v : rectified.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(rectified.data.size());
  return std::sqrt(var) >= cfg.verify_min_std;
}

// Detection mode hysteresis: each consecutive miss counts toward the
// permissive fallback; any success snaps back to strict.
struct ModeController {
  DetectionMode mode = DetectionMode::strict;
  int miss_count = 0;

  void step(bool detected, const DetectionConfig& cfg = {}) {
    if (detected) {
      mode = DetectionMode::strict;
      miss_count = 0;
      return;
    }
    ++miss_count;
    if (miss_count >= cfg.mode_switch_misses) mode = DetectionMode::permissive;
  }
};

namespace detail {

// Copies a region into a buffer with a background margin on all sides.
// The margin gives the closing room to operate: erosion reads outside the
// region as background, so structure touching the region edge would
// otherwise be eaten.
inline Raster crop_padded(const Raster& img, const Rect& r, int pad_x,
                          int pad_y) {
  Raster out(r.w + 2 * pad_x, r.h + 2 * pad_y, 0);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x)
      out.at(pad_x + x, pad_y + y) = img.at(r.x + x, r.y + y);
  return out;
}

}  // namespace detail

// Candidate-driven plate search. The frame is adaptively thresholded (dark
// foreground); external contours are ranked by pixel count and the largest
// max_candidates are examined in turn. Each candidate's bounding region is
// closed with a kernel proportional to the candidate size, the dominant
// blob inside is fitted with an oriented rectangle, and aspect/size gates
// (mode dependent) plus a content check — character segmentation for small
// plates, the plate-likeness heuristic otherwise — decide acceptance. The
// first accepted candidate wins.
inline std::optional<Detection> detect_plate(const Raster& frame,
                                             const DetectionConfig& cfg = {},
                                             DetectionMode mode =
                                                 DetectionMode::strict) {
  if (frame.empty()) throw std::invalid_argument("detect_plate: empty image");

  const double aspect_min = mode == DetectionMode::strict
                                ? cfg.strict_aspect_min
                                : cfg.permissive_aspect_min;
  const double aspect_max = mode == DetectionMode::strict
                                ? cfg.strict_aspect_max
                                : cfg.permissive_aspect_max;
  const double area_scale =
      static_cast<double>(frame.width) * frame.height / (1280.0 * 720.0);
  const double min_area = cfg.min_area_px * area_scale;

  const Raster bin = adaptive_threshold(frame, cfg.threshold_window,
                                        cfg.threshold_c,
                                        Polarity::dark_foreground);
  // Only the candidates that survive ranking ever need their boundary, so
  // the component sweep skips tracing the tens of thousands of noise blobs.
  std::vector<ComponentStats> contours = find_components(bin);
  std::stable_sort(contours.begin(), contours.end(),
                   [](const ComponentStats& a, const ComponentStats& b) {
                     return a.area > b.area;
                   });
  if (static_cast<int>(contours.size()) > cfg.max_candidates)
    contours.resize(cfg.max_candidates);

  for (const ComponentStats& cand : contours) {
    const Rect box = cand.bbox;
    if (static_cast<double>(box.w) * box.h < min_area) continue;

    const int kw = std::max(3, static_cast<int>(std::lround(0.2 * box.w)));
    const int kh = std::max(3, static_cast<int>(std::lround(0.1 * box.h)));
    const Raster closed =
        morph_close(detail::crop_padded(bin, box, kw, kh), kw, kh);

    std::vector<ComponentStats> inner = find_components(closed);
    if (inner.empty()) continue;
    const ComponentStats& blob =
        *std::max_element(inner.begin(), inner.end(),
                          [](const ComponentStats& a,
                             const ComponentStats& b) {
                            return a.area < b.area;
                          });

    Contour traced;
    traced.area = blob.area;
    traced.bbox = blob.bbox;
    traced.points = detail::trace_boundary(closed, blob.start);
    RotatedRect rect = fit_rotated_rect(traced);
    rect.center.x += box.x - kw;  // back to frame coordinates
    rect.center.y += box.y - kh;
    if (rect.width < rect.height) {
      std::swap(rect.width, rect.height);
      rect.angle += 1.57079632679489661923;
    }
    if (rect.height < 1.0) continue;
    const double aspect = rect.width / rect.height;
    if (aspect < aspect_min || aspect > aspect_max) continue;
    if (rect.height < cfg.min_rect_h || rect.width < cfg.min_rect_w) continue;

    PlateQuad quad;
    quad.rect = rect;
    quad.corners = order_corners(rect.corner_points());

    const int out_w = cfg.warp_width;
    const int out_h =
        std::max(1, static_cast<int>(std::lround(cfg.warp_width / aspect)));
    const std::array<Vec2, 4> dst = {Vec2{0.0, 0.0},
                                     Vec2{out_w - 1.0, 0.0},
                                     Vec2{out_w - 1.0, out_h - 1.0},
                                     Vec2{0.0, out_h - 1.0}};
    Homography h;
    try {
      h = solve_homography(quad.corners, dst);
    } catch (const std::invalid_argument&) {
      continue;  // degenerate corner set
    }
    Raster rectified = warp_perspective(frame, h, out_w, out_h);

    bool accepted;
    if (rect.height < cfg.small_plate_rows) {
      auto seg = segment_characters(rectified, cfg.segmentation);
      accepted = seg.has_value() && seg->n >= cfg.segmentation.min_chars;
    } else {
      accepted = verify_plate_region(rectified, cfg);
    }
    if (accepted) return Detection{quad, std::move(rectified)};
  }
  return std::nullopt;
}

}  // namespace lpr
