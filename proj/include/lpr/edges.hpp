#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lpr/raster.hpp"

namespace lpr {

// Canny edge map: 3x3 Sobel gradients (border replicated), non-maximum
// suppression along the gradient direction quantized to 4 orientation bins,
// then double-threshold hysteresis with 8-connected linking. Thresholds
// compare against the L2 gradient magnitude. Edge pixels are 255.
inline Raster canny(const Raster& img, double low, double high) {
  if (img.empty()) throw std::invalid_argument("canny: empty image");
  if (low < 0.0 || high < low)
    throw std::invalid_argument("canny: need 0 <= low <= high");
  const int w = img.width, h = img.height;

  std::vector<float> mag(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> bin(static_cast<std::size_t>(w) * h);
  // Sobel responses are integers in [-1020, 1020], so gx^2 + gy^2 is exact
  // in double and the orientation bin reduces to sign/ratio tests against
  // tan(22.5 deg); no integer gradient pair lands on a bin boundary.
  const double t = 0.41421356237309503;  // tan(pi/8)
  auto store = [&](std::size_t i, int gx, int gy) {
    mag[i] = static_cast<float>(std::sqrt(
        static_cast<double>(gx) * gx + static_cast<double>(gy) * gy));
    // orientation bin: 0 = E/W, 1 = NE/SW diagonal, 2 = N/S, 3 = NW/SE
    const double ax = std::abs(gx), ay = std::abs(gy);
    std::uint8_t b;
    if (ay < t * ax)
      b = 0;
    else if (ay * t > ax)
      b = 2;
    else
      b = (gx >= 0) == (gy >= 0) ? 1 : 3;
    bin[i] = b;
  };
  auto clamped = [&](int x, int y) {
    auto p = [&](int dx, int dy) {
      return static_cast<int>(img.at_clamped(x + dx, y + dy));
    };
    const int gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) -
                   (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
    const int gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) -
                   (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
    store(static_cast<std::size_t>(y) * w + x, gx, gy);
  };
  for (int y = 0; y < h; ++y) {
    if (y == 0 || y == h - 1 || w < 3) {
      for (int x = 0; x < w; ++x) clamped(x, y);
      continue;
    }
    clamped(0, y);
    const std::uint8_t* r0 = &img.data[static_cast<std::size_t>(y - 1) * w];
    const std::uint8_t* r1 = r0 + w;
    const std::uint8_t* r2 = r1 + w;
    for (int x = 1; x < w - 1; ++x) {
      const int gx = (r0[x + 1] + 2 * r1[x + 1] + r2[x + 1]) -
                     (r0[x - 1] + 2 * r1[x - 1] + r2[x - 1]);
      const int gy = (r2[x - 1] + 2 * r2[x] + r2[x + 1]) -
                     (r0[x - 1] + 2 * r0[x] + r0[x + 1]);
      store(static_cast<std::size_t>(y) * w + x, gx, gy);
    }
    clamped(w - 1, y);
  }

  // non-maximum suppression; the positive-direction neighbor must be
  // strictly smaller so a two-pixel plateau keeps exactly one pixel
  static constexpr int nx[4] = {1, 1, 0, -1};
  static constexpr int ny[4] = {0, 1, 1, 1};
  Raster out(w, h, 0);
  std::vector<std::size_t> strong;
  auto mag_at = [&](int x, int y) -> float {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0f;
    return mag[static_cast<std::size_t>(y) * w + x];
  };
  // 0 = suppressed, 1 = weak candidate, 2 = strong seed
  std::vector<std::uint8_t> cls(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const float m = mag[i];
      if (m < low) continue;
      const int b = bin[i];
      if (!(m > mag_at(x + nx[b], y + ny[b]) &&
            m >= mag_at(x - nx[b], y - ny[b])))
        continue;
      if (m >= high) {
        cls[i] = 2;
        strong.push_back(i);
      } else {
        cls[i] = 1;
      }
    }

  // hysteresis: flood from strong pixels through weak ones
  while (!strong.empty()) {
    const std::size_t i = strong.back();
    strong.pop_back();
    if (out.data[i]) continue;
    out.data[i] = 255;
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int xx = x + dx, yy = y + dy;
        if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
        const std::size_t j = static_cast<std::size_t>(yy) * w + xx;
        if (cls[j] && !out.data[j]) strong.push_back(j);
      }
  }
  return out;
}

}  // namespace lpr
