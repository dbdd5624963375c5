#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lpr/geometry.hpp"
#include "lpr/raster.hpp"

namespace lpr {

struct FlowResult {
  std::vector<Vec2> points;   // tracked locations in the next frame
  std::vector<bool> status;   // false when the point could not be tracked
};

struct FlowConfig {
  int levels = 3;             // pyramid depth (level 0 = full resolution)
  int window = 15;            // odd square window
  int max_iterations = 30;
  double epsilon = 0.01;      // stop when the update is below this (px)
  double min_eigenvalue = 1e-4;  // of the structure tensor / window area
};

namespace detail {

struct FloatImage {
  int width = 0, height = 0;
  std::vector<float> data;
  float at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  float sample(double x, double y) const {
    x = std::clamp(x, 0.0, width - 1.0);
    y = std::clamp(y, 0.0, height - 1.0);
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, width - 1), y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0, fy = y - y0;
    const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
    const double bot = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
    return static_cast<float>(top * (1.0 - fy) + bot * fy);
  }
};

inline FloatImage to_float(const Raster& r) {
  FloatImage f;
  f.width = r.width;
  f.height = r.height;
  f.data.assign(r.data.begin(), r.data.end());
  return f;
}

inline FloatImage half_size(const FloatImage& in) {
  FloatImage out;
  out.width = std::max(1, in.width / 2);
  out.height = std::max(1, in.height / 2);
  out.data.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      const int sx = 2 * x, sy = 2 * y;
      const int sx1 = std::min(sx + 1, in.width - 1);
      const int sy1 = std::min(sy + 1, in.height - 1);
      out.data[static_cast<std::size_t>(y) * out.width + x] =
          0.25f * (in.at(sx, sy) + in.at(sx1, sy) + in.at(sx, sy1) +
                   in.at(sx1, sy1));
    }
  return out;
}

}  // namespace detail

// Pyramidal Lucas-Kanade sparse optical flow. For each input point the
// displacement minimizing the window SSD between prev and next is iterated
// from the coarsest pyramid level down. A point fails (status false) when
// its structure tensor is near-singular — min eigenvalue divided by the
// window pixel count below min_eigenvalue — or when it leaves the image.
inline FlowResult lk_flow(const Raster& prev, const Raster& next,
                          const std::vector<Vec2>& points,
                          const FlowConfig& cfg = {}) {
  if (prev.empty() || next.empty())
    throw std::invalid_argument("lk_flow: empty image");
  if (prev.width != next.width || prev.height != next.height)
    throw std::invalid_argument("lk_flow: frame dimensions differ");
  if (cfg.window < 3 || cfg.window % 2 == 0 || cfg.levels < 1)
    throw std::invalid_argument("lk_flow: bad configuration");

  std::vector<detail::FloatImage> pyr_prev{detail::to_float(prev)};
  std::vector<detail::FloatImage> pyr_next{detail::to_float(next)};
  for (int l = 1; l < cfg.levels; ++l) {
    pyr_prev.push_back(detail::half_size(pyr_prev.back()));
    pyr_next.push_back(detail::half_size(pyr_next.back()));
  }

  const int half = cfg.window / 2;
  const int win_px = cfg.window * cfg.window;

  FlowResult res;
  res.points.resize(points.size());
  res.status.assign(points.size(), true);

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    Vec2 g{0.0, 0.0};  // displacement estimate, coarsest-level coordinates
    bool ok = true;

    for (int l = cfg.levels - 1; l >= 0 && ok; --l) {
      const detail::FloatImage& a = pyr_prev[l];
      const detail::FloatImage& b = pyr_next[l];
      const double scale = 1.0 / static_cast<double>(1 << l);
      const Vec2 p{points[pi].x * scale, points[pi].y * scale};
      if (p.x < 0.0 || p.y < 0.0 || p.x > a.width - 1.0 ||
          p.y > a.height - 1.0) {
        ok = false;
        break;
      }

      // window samples and gradients of the reference frame
      std::vector<double> iv(win_px), ix(win_px), iy(win_px);
      double gxx = 0.0, gxy = 0.0, gyy = 0.0;
      int k = 0;
      for (int wy = -half; wy <= half; ++wy)
        for (int wx = -half; wx <= half; ++wx, ++k) {
          const double sx = p.x + wx, sy = p.y + wy;
          iv[k] = a.sample(sx, sy);
          ix[k] = (a.sample(sx + 1.0, sy) - a.sample(sx - 1.0, sy)) / 2.0;
          iy[k] = (a.sample(sx, sy + 1.0) - a.sample(sx, sy - 1.0)) / 2.0;
          gxx += ix[k] * ix[k];
          gxy += ix[k] * iy[k];
          gyy += iy[k] * iy[k];
        }

      const double tr = gxx + gyy;
      const double dt = gxx * gyy - gxy * gxy;
      const double min_eig = (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * dt))) / 2.0;
      if (min_eig / win_px < cfg.min_eigenvalue) {
        ok = false;
        break;
      }

      for (int it = 0; it < cfg.max_iterations; ++it) {
        double bx = 0.0, by = 0.0;
        k = 0;
        for (int wy = -half; wy <= half; ++wy)
          for (int wx = -half; wx <= half; ++wx, ++k) {
            const double d =
                iv[k] - b.sample(p.x + g.x + wx, p.y + g.y + wy);
            bx += d * ix[k];
            by += d * iy[k];
          }
        const double ux = (gyy * bx - gxy * by) / dt;
        const double uy = (gxx * by - gxy * bx) / dt;
        g.x += ux;
        g.y += uy;
        if (std::hypot(ux, uy) < cfg.epsilon) break;
      }

      const Vec2 moved{p.x + g.x, p.y + g.y};
      if (moved.x < 0.0 || moved.y < 0.0 || moved.x > b.width - 1.0 ||
          moved.y > b.height - 1.0) {
        ok = false;
        break;
      }
      if (l > 0) g = g * 2.0;  // propagate to the finer level
    }

    res.status[pi] = ok;
    res.points[pi] = ok ? points[pi] + g : points[pi];
  }
  return res;
}

}  // namespace lpr
