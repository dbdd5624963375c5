#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lpr/contours.hpp"
#include "lpr/morphology.hpp"
#include "lpr/raster.hpp"
#include "lpr/resize.hpp"
#include "lpr/threshold.hpp"

namespace lpr {

// Character bounding box in rectified-plate coordinates. Fields are real
// valued: boxes found on an upscaled plate are divided back by the scale.
struct CharBox {
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
};

struct SegmentationResult {
  std::vector<CharBox> boxes;     // left-to-right
  std::vector<double> heights;    // per kept character, pixels
  double avg_height = 0.0;
  double height_std = 0.0;        // population std of kept heights
  int n = 0;                      // kept character count, >= 3
  double stroke_width = 0.0;      // median horizontal ink run, px
  double char_spacing = 0.0;      // median inter-box gap, px
  double border_thickness = 0.0;  // median frame run, px (0 = no frame)
  double scale_applied = 1.0;     // upscale factor that was divided out
};

struct SegmentationConfig {
  double min_height_px = 100.0;   // upscale plates shorter than this
  int threshold_window = 11;
  double threshold_c = 2.0;
  double clahe_clip = 2.0;
  int clahe_tiles = 8;
  int morph_kernel = 3;
  // candidate filters, relative to the (upscaled) plate height
  double min_rel_height = 0.2;
  double max_rel_height = 0.8;
  double max_w_over_h = 1.8;
  double min_aspect = 0.15;
  double max_aspect = 1.5;
  int min_box_h = 5;
  int min_box_w = 2;
  double band_margin = 0.1;       // boxes must sit inside the central band
  int min_chars = 3;
};

// Converts a result measured on a rectified plate back to source-image
// pixels. sx/sy are the horizontal/vertical source-per-rectified factors;
// border thickness, which mixes runs along both axes, uses their mean.
inline SegmentationResult rescale_segmentation(SegmentationResult seg,
                                               double sx, double sy) {
  if (!(sx > 0.0) || !(sy > 0.0))
    throw std::invalid_argument("rescale_segmentation: factors must be > 0");
  for (CharBox& b : seg.boxes) {
    b.x *= sx;
    b.w *= sx;
    b.y *= sy;
    b.h *= sy;
  }
  for (double& h : seg.heights) h *= sy;
  seg.avg_height *= sy;
  seg.height_std *= sy;
  seg.stroke_width *= sx;
  seg.char_spacing *= sx;
  seg.border_thickness *= 0.5 * (sx + sy);
  return seg;
}

// Arithmetic mean with the k/2 largest and k/2 smallest values removed.
// k must be even and smaller than the sample count.
inline double trimmed_mean(std::vector<double> values, int k = 2) {
  if (k < 0 || k % 2 != 0)
    throw std::invalid_argument("trimmed_mean: k must be even and >= 0");
  if (static_cast<std::size_t>(k) >= values.size())
    throw std::invalid_argument("trimmed_mean: k must be smaller than the sample");
  std::sort(values.begin(), values.end());
  const int half = k / 2;
  double sum = 0.0;
  for (std::size_t i = half; i < values.size() - half; ++i) sum += values[i];
  return sum / static_cast<double>(values.size() - k);
}

// Outcome of the deviant-height rejection: which input indices survive, and
// the statistics the decision was based on.
struct HeightFilter {
  double median = 0.0;
  double sigma = 0.0;          // population standard deviation
  std::vector<int> kept;       // indices into the input, original order
};

// Keeps heights strictly closer than two population-sigmas to the median.
// With zero spread there is nothing to reject and every index survives.
inline HeightFilter reject_deviant_heights(const std::vector<double>& heights) {
  if (heights.empty())
    throw std::invalid_argument("reject_deviant_heights: empty sample");
  HeightFilter out;
  std::vector<double> s = heights;
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  out.median = n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2.0;
  double mean = 0.0;
  for (double v : heights) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : heights) var += (v - mean) * (v - mean);
  out.sigma = std::sqrt(var / static_cast<double>(n));
  for (std::size_t i = 0; i < heights.size(); ++i)
    if (out.sigma == 0.0 || std::abs(heights[i] - out.median) < 2.0 * out.sigma)
      out.kept.push_back(static_cast<int>(i));
  return out;
}

// Typography statistics measured on a binary plate (255 = ink) and its
// character boxes, in the coordinate frame of `binary`.
struct TypographicFeatures {
  double stroke_width = 0.0;
  double char_spacing = 0.0;
  double border_thickness = 0.0;
};

inline TypographicFeatures measure_typographic_features(
    const Raster& binary, const std::vector<Rect>& boxes) {
  TypographicFeatures f;
  auto median = [](std::vector<double> v) -> double {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  };

  // stroke width: maximal horizontal ink runs inside the boxes
  std::vector<double> runs;
  for (const Rect& b : boxes) {
    for (int y = b.y; y < b.bottom(); ++y) {
      int run = 0;
      for (int x = b.x; x < b.right(); ++x) {
        if (binary.in_bounds(x, y) && binary.at(x, y) != 0) {
          ++run;
        } else if (run > 0) {
          runs.push_back(run);
          run = 0;
        }
      }
      if (run > 0) runs.push_back(run);
    }
  }
  f.stroke_width = median(std::move(runs));

  // spacing: gaps between x-sorted boxes
  std::vector<Rect> sorted = boxes;
  std::sort(sorted.begin(), sorted.end(),
            [](const Rect& a, const Rect& b) { return a.x < b.x; });
  std::vector<double> gaps;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    gaps.push_back(static_cast<double>(sorted[i].x) - sorted[i - 1].right());
  f.char_spacing = median(std::move(gaps));

  // border: ink run entered from each edge along the central row/column;
  // an edge whose first ink lies deeper than 15% of the span contributes 0
  const int w = binary.width, h = binary.height;
  const int mid_y = h / 2, mid_x = w / 2;
  auto walk = [&](int x, int y, int dx, int dy, int span) -> double {
    const int reach = static_cast<int>(std::floor(0.15 * span));
    int i = 0;
    while (i <= reach && binary.in_bounds(x, y) && binary.at(x, y) == 0) {
      x += dx;
      y += dy;
      ++i;
    }
    if (i > reach || !binary.in_bounds(x, y) || binary.at(x, y) == 0)
      return 0.0;
    int run = 0;
    while (binary.in_bounds(x, y) && binary.at(x, y) != 0) {
      ++run;
      x += dx;
      y += dy;
    }
    return run;
  };
  f.border_thickness = median({walk(0, mid_y, 1, 0, w),       // left
                               walk(w - 1, mid_y, -1, 0, w),  // right
                               walk(mid_x, 0, 0, 1, h),       // top
                               walk(mid_x, h - 1, 0, -1, h)});  // bottom
  return f;
}

namespace detail {

struct MethodOutcome {
  std::vector<Rect> kept;
  Raster binary;
};

// Shared candidate filtering + deviant-height rejection for one
// binarization method.
inline MethodOutcome filter_candidates(const Raster& binary,
                                       const SegmentationConfig& cfg,
                                       double plate_h) {
  MethodOutcome out;
  out.binary = morph_close(morph_open(binary, cfg.morph_kernel, cfg.morph_kernel),
                           cfg.morph_kernel, cfg.morph_kernel);

  std::vector<Rect> candidates;
  for (const ComponentStats& c : find_components(out.binary)) {
    const Rect r = c.bbox;
    const double hh = r.h, ww = r.w;
    if (hh < cfg.min_rel_height * plate_h || hh > cfg.max_rel_height * plate_h)
      continue;
    if (ww > cfg.max_w_over_h * hh) continue;
    const double aspect = ww / hh;
    if (aspect < cfg.min_aspect || aspect > cfg.max_aspect) continue;
    if (r.h < cfg.min_box_h || r.w < cfg.min_box_w) continue;
    if (r.y < cfg.band_margin * plate_h ||
        r.y + r.h > (1.0 - cfg.band_margin) * plate_h)
      continue;
    candidates.push_back(r);
  }

  if (static_cast<int>(candidates.size()) >= cfg.min_chars) {
    std::vector<double> hs;
    for (const Rect& r : candidates) hs.push_back(r.h);
    for (int i : reject_deviant_heights(hs).kept)
      out.kept.push_back(candidates[i]);
  } else {
    out.kept = candidates;
  }
  return out;
}

}  // namespace detail

// Character extraction from a rectified plate. Short plates are upscaled
// (bicubic) to at least min_height_px; contrast is equalized (CLAHE) and the
// plate binarized two ways — locally adaptive and global Otsu, dark ink as
// foreground. Each binary goes through open/close cleanup, contour boxes,
// five geometry filters and a two-sigma height rejection; whichever method
// keeps more characters wins (ties favor the adaptive method). Fails (nullopt)
// when neither method keeps at least min_chars boxes. All reported pixel
// measurements are divided by the applied upscale.
inline std::optional<SegmentationResult> segment_characters(
    const Raster& plate, const SegmentationConfig& cfg = {}) {
  if (plate.empty())
    throw std::invalid_argument("segment_characters: empty image");

  Raster work = plate;
  double s = 1.0;
  if (plate.height < cfg.min_height_px) {
    s = std::max(2.0, cfg.min_height_px / plate.height);
    work = resize_bicubic(plate, s);
  }
  const double plate_h = work.height;

  const Raster eq = clahe(work, cfg.clahe_clip, cfg.clahe_tiles, cfg.clahe_tiles);
  const Raster t_adaptive = adaptive_threshold(eq, cfg.threshold_window,
                                               cfg.threshold_c,
                                               Polarity::dark_foreground);
  const Raster t_otsu = otsu_threshold(eq, Polarity::dark_foreground).binary;

  detail::MethodOutcome adaptive =
      detail::filter_candidates(t_adaptive, cfg, plate_h);
  detail::MethodOutcome otsu = detail::filter_candidates(t_otsu, cfg, plate_h);

  detail::MethodOutcome& best =
      otsu.kept.size() > adaptive.kept.size() ? otsu : adaptive;
  if (static_cast<int>(best.kept.size()) < cfg.min_chars) return std::nullopt;

  std::sort(best.kept.begin(), best.kept.end(),
            [](const Rect& a, const Rect& b) { return a.x < b.x; });

  SegmentationResult r;
  r.scale_applied = s;
  r.n = static_cast<int>(best.kept.size());
  double sum = 0.0;
  for (const Rect& b : best.kept) {
    r.boxes.push_back({b.x / s, b.y / s, b.w / s, b.h / s});
    r.heights.push_back(b.h / s);
    sum += b.h / s;
  }
  r.avg_height = sum / r.n;
  double var = 0.0;
  for (double v : r.heights) var += (v - r.avg_height) * (v - r.avg_height);
  r.height_std = std::sqrt(var / r.n);

  const TypographicFeatures tf =
      measure_typographic_features(best.binary, best.kept);
  r.stroke_width = tf.stroke_width / s;
  r.char_spacing = tf.char_spacing / s;
  r.border_thickness = tf.border_thickness / s;
  return r;
}

}  // namespace lpr
