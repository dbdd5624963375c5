#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lpr/raster.hpp"

namespace lpr {

namespace detail {

// Catmull-Rom weights (cubic convolution, a = -0.5) for a fractional
// position t in [0,1) between samples p1 and p2 of the p0..p3 window.
inline void catmull_rom_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = -0.5 * t3 + t2 - 0.5 * t;
  w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
  w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
  w[3] = 0.5 * t3 - 0.5 * t2;
}

}  // namespace detail

// Separable Catmull-Rom resampling. Output dimensions are
// max(1, round(dim * scale)); sample positions follow the half-pixel-center
// convention so scale = 1 reproduces the input exactly. Out-of-range taps
// replicate the edge; results clamp to [0, 255].
inline Raster resize_bicubic(const Raster& img, double scale) {
  if (img.empty()) throw std::invalid_argument("resize_bicubic: empty image");
  if (!(scale > 0.0)) throw std::invalid_argument("resize_bicubic: scale must be > 0");

  const int ow = std::max(1, static_cast<int>(std::lround(img.width * scale)));
  const int oh = std::max(1, static_cast<int>(std::lround(img.height * scale)));

  // horizontal pass
  std::vector<double> mid(static_cast<std::size_t>(ow) * img.height);
  std::vector<int> xi(ow);
  std::vector<std::array<double, 4>> xw(ow);
  for (int x = 0; x < ow; ++x) {
    double sx = (x + 0.5) * img.width / ow - 0.5;
    double fx = std::floor(sx);
    xi[x] = static_cast<int>(fx);
    detail::catmull_rom_weights(sx - fx, xw[x].data());
  }
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = -1; k <= 2; ++k)
        acc += xw[x][k + 1] * img.at_clamped(xi[x] + k, y);
      mid[static_cast<std::size_t>(y) * ow + x] = acc;
    }

  // vertical pass
  Raster out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    double sy = (y + 0.5) * img.height / oh - 0.5;
    double fy = std::floor(sy);
    int yi = static_cast<int>(fy);
    double wy[4];
    detail::catmull_rom_weights(sy - fy, wy);
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = -1; k <= 2; ++k) {
        int yy = std::clamp(yi + k, 0, img.height - 1);
        acc += wy[k + 1] * mid[static_cast<std::size_t>(yy) * ow + x];
      }
      out.at(x, y) = round_u8(acc);
    }
  }
  return out;
}

}  // namespace lpr
