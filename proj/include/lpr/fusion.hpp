#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lpr/geometry.hpp"
#include "lpr/ranging.hpp"

namespace lpr {

// Dense single-channel depth (or relative-depth) grid, row-major, top row
// first. Values carry whatever unit the producer used; alignment against
// metric estimates is handled separately.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  DepthMap() = default;
  DepthMap(int w, int h, float fill = 0.0f)
      : width(w), height(h),
        data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  bool empty() const { return width <= 0 || height <= 0; }
  float& at(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  float at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

namespace detail {

inline double median_float(std::vector<float>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (static_cast<double>(v[n / 2 - 1]) + v[n / 2]);
}

}  // namespace detail

// Median depth inside the axis-aligned bounding box of a plate quad,
// clipped to the map. Throws if the region misses the map entirely.
inline double plate_relative_depth(const DepthMap& depth,
                                   const std::array<Vec2, 4>& quad) {
  if (depth.empty())
    throw std::invalid_argument("plate_relative_depth: empty depth map");
  double min_x = quad[0].x, max_x = quad[0].x;
  double min_y = quad[0].y, max_y = quad[0].y;
  for (int i = 1; i < 4; ++i) {
    min_x = std::min(min_x, quad[i].x);
    max_x = std::max(max_x, quad[i].x);
    min_y = std::min(min_y, quad[i].y);
    max_y = std::max(max_y, quad[i].y);
  }
  const int x0 = std::max(0, static_cast<int>(std::floor(min_x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(min_y)));
  const int x1 = std::min(depth.width - 1, static_cast<int>(std::ceil(max_x)));
  const int y1 = std::min(depth.height - 1, static_cast<int>(std::ceil(max_y)));
  if (x0 > x1 || y0 > y1)
    throw std::invalid_argument(
        "plate_relative_depth: plate region outside depth map");

  std::vector<float> values;
  values.reserve(static_cast<std::size_t>(x1 - x0 + 1) * (y1 - y0 + 1));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) values.push_back(depth.at(x, y));
  return detail::median_float(values);
}

// Exponential moving average of the metric-over-relative depth ratio. The
// first observation seeds the scale directly; later observations blend in
// with weight (1 - smoothing).
struct ScaleAligner {
  double smoothing = 0.9;
  double scale = 1.0;
  bool initialized = false;

  double update(double metric_distance, double relative_depth) {
    if (relative_depth <= 0.0)
      throw std::invalid_argument("ScaleAligner: relative depth must be > 0");
    if (metric_distance <= 0.0)
      throw std::invalid_argument("ScaleAligner: metric distance must be > 0");
    const double ratio = metric_distance / relative_depth;
    if (!initialized) {
      scale = ratio;
      initialized = true;
    } else {
      scale = smoothing * scale + (1.0 - smoothing) * ratio;
    }
    return scale;
  }

  bool ready() const { return initialized; }
};

// Metric distance from an aligned relative depth. The variance model is a
// fixed relative error on the produced value.
inline Estimate depth_estimate(double relative_depth,
                               const ScaleAligner& aligner,
                               double relative_sigma = 0.15) {
  if (relative_depth <= 0.0)
    throw std::invalid_argument("depth_estimate: relative depth must be > 0");
  if (!aligner.ready())
    throw std::logic_error("depth_estimate: scale aligner not initialized");
  Estimate e;
  e.source = EstimateSource::depth_map;
  e.distance_m = aligner.scale * relative_depth;
  const double sigma = relative_sigma * e.distance_m;
  e.variance_m2 = sigma * sigma;
  return e;
}

}  // namespace lpr
