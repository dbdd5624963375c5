#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lpr/raster.hpp"

namespace lpr {

enum class Polarity {
  dark_foreground,  // pixels at or below the threshold become 255
  light_foreground  // pixels above the threshold become 255
};

namespace detail {

// 1-D Gaussian taps for a given odd window, normalized to sum 1. The sigma
// follows the usual window-derived rule sigma = 0.3*((n-1)/2 - 1) + 0.8.
inline std::vector<double> gaussian_taps(int window) {
  const int half = (window - 1) / 2;
  const double sigma = 0.3 * (half - 1) + 0.8;
  std::vector<double> k(window);
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    double d = i - half;
    k[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace detail

// Local Gaussian-weighted mean threshold. The smoothed surface is computed
// in double precision (separable, border replicated) and rounded to the
// nearest integer; a pixel is foreground when it sits on the dark (or
// light) side of that surface minus (plus) the constant offset c.
inline Raster adaptive_threshold(const Raster& img, int window, double c,
                                 Polarity polarity = Polarity::dark_foreground) {
  if (img.empty()) throw std::invalid_argument("adaptive_threshold: empty image");
  if (window < 3 || window % 2 == 0)
    throw std::invalid_argument("adaptive_threshold: window must be odd and >= 3");

  const std::vector<double> taps = detail::gaussian_taps(window);
  const int half = (window - 1) / 2;
  const int w = img.width, h = img.height;

  // horizontal pass; columns far enough from the edges skip the clamping.
  // The interior sweeps taps in the outer loop so each tap scales a whole
  // contiguous stretch (vector-friendly); per-column summation order is
  // still tap 0 .. tap window-1.
  std::vector<double> rowpass(static_cast<std::size_t>(w) * h);
  const int lo = std::min(half, w);
  const int hi = std::max(lo, w - half);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = &img.data[static_cast<std::size_t>(y) * w];
    double* dst = &rowpass[static_cast<std::size_t>(y) * w];
    auto clamped = [&](int x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k)
        acc += taps[k + half] * row[std::clamp(x + k, 0, w - 1)];
      dst[x] = acc;
    };
    for (int x = 0; x < lo; ++x) clamped(x);
    if (lo < hi) {
      std::fill(dst + lo, dst + hi, 0.0);
      for (int k = 0; k < window; ++k) {
        const double t = taps[k];
        const std::uint8_t* p = row + (k - half);
        for (int x = lo; x < hi; ++x) dst[x] += t * p[x];
      }
    }
    for (int x = hi; x < w; ++x) clamped(x);
  }

  // vertical pass accumulates whole rows so the memory walk stays linear
  Raster out(w, h);
  std::vector<double> acc(w);
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int k = -half; k <= half; ++k) {
      const int yy = std::clamp(y + k, 0, h - 1);
      const double t = taps[k + half];
      const double* src = &rowpass[static_cast<std::size_t>(yy) * w];
      for (int x = 0; x < w; ++x) acc[x] += t * src[x];
    }
    const std::uint8_t* irow = &img.data[static_cast<std::size_t>(y) * w];
    std::uint8_t* orow = &out.data[static_cast<std::size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      const int mean = static_cast<int>(std::lround(acc[x]));
      const int v = irow[x];
      bool fg;
      if (polarity == Polarity::dark_foreground)
        fg = v <= mean - c;
      else
        fg = v > mean + c;
      orow[x] = fg ? 255 : 0;
    }
  }
  return out;
}

// Threshold value maximizing between-class variance over the 256-bin
// histogram; ties resolve toward the lower value. A single-intensity image
// yields (that intensity, all-background) — there is no split to make.
struct OtsuResult {
  int threshold = 0;
  Raster binary;
};

inline int otsu_threshold_from_histogram(const std::array<std::int64_t, 256>& hist) {
  std::int64_t total = 0;
  double total_sum = 0.0;
  for (int i = 0; i < 256; ++i) {
    total += hist[i];
    total_sum += static_cast<double>(i) * hist[i];
  }
  if (total == 0)
    throw std::invalid_argument("otsu_threshold: empty histogram");

  double best = -1.0;
  int best_t = 0;
  std::int64_t n_lo = 0;
  double sum_lo = 0.0;
  for (int t = 0; t < 256; ++t) {
    n_lo += hist[t];
    sum_lo += static_cast<double>(t) * hist[t];
    const std::int64_t n_hi = total - n_lo;
    if (n_lo == 0 || n_hi == 0) continue;
    const double mu_lo = sum_lo / n_lo;
    const double mu_hi = (total_sum - sum_lo) / n_hi;
    const double d = mu_lo - mu_hi;
    const double between = static_cast<double>(n_lo) * n_hi * d * d;
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  if (best < 0.0) {
    // single occupied bin: report that intensity
    for (int i = 0; i < 256; ++i)
      if (hist[i] > 0) return i;
  }
  return best_t;
}

inline OtsuResult otsu_threshold(const Raster& img,
                                 Polarity polarity = Polarity::dark_foreground) {
  if (img.empty()) throw std::invalid_argument("otsu_threshold: empty image");
  std::array<std::int64_t, 256> hist{};
  for (std::uint8_t v : img.data) ++hist[v];

  int occupied = 0;
  for (int i = 0; i < 256; ++i) occupied += hist[i] > 0;

  OtsuResult r;
  r.threshold = otsu_threshold_from_histogram(hist);
  r.binary = Raster(img.width, img.height, 0);
  if (occupied <= 1) return r;  // uniform image: empty foreground

  for (std::size_t i = 0; i < img.data.size(); ++i) {
    bool fg = polarity == Polarity::dark_foreground
                  ? img.data[i] <= r.threshold
                  : img.data[i] > r.threshold;
    r.binary.data[i] = fg ? 255 : 0;
  }
  return r;
}

namespace detail {

// Classic histogram equalization table anchored at the first occupied bin:
// LUT(v) = round((cdf(v) - cdf_min) * 255 / (N - cdf_min)). A histogram with
// a single occupied bin maps identically.
inline std::array<std::uint8_t, 256> equalization_lut(
    const std::array<std::int64_t, 256>& hist, std::int64_t total) {
  std::array<std::uint8_t, 256> lut{};
  std::int64_t cdf_min = 0;
  for (int i = 0; i < 256; ++i)
    if (hist[i] > 0) { cdf_min = hist[i]; break; }
  if (cdf_min == total) {
    for (int i = 0; i < 256; ++i) lut[i] = static_cast<std::uint8_t>(i);
    return lut;
  }
  const double scale = 255.0 / static_cast<double>(total - cdf_min);
  std::int64_t cdf = 0;
  for (int i = 0; i < 256; ++i) {
    cdf += hist[i];
    double v = cdf <= cdf_min ? 0.0 : static_cast<double>(cdf - cdf_min) * scale;
    lut[i] = round_u8(v);
  }
  return lut;
}

}  // namespace detail

inline Raster equalize_histogram(const Raster& img) {
  if (img.empty()) throw std::invalid_argument("equalize_histogram: empty image");
  std::array<std::int64_t, 256> hist{};
  for (std::uint8_t v : img.data) ++hist[v];
  auto lut = detail::equalization_lut(hist, static_cast<std::int64_t>(img.data.size()));
  Raster out(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = lut[img.data[i]];
  return out;
}

// Contrast-limited adaptive histogram equalization. Per-tile histograms are
// clipped at clip_limit * tile_pixels / 256 with the excess redistributed
// evenly; each tile gets an equalization table and pixels blend the four
// nearest tables bilinearly (edge tiles replicate beyond the outer centers).
// A tile whose histogram occupies a single bin keeps its identity mapping,
// so flat regions pass through unchanged. Images smaller than the tile grid
// fall back to plain global equalization.
inline Raster clahe(const Raster& img, double clip_limit = 2.0,
                    int tiles_x = 8, int tiles_y = 8) {
  if (img.empty()) throw std::invalid_argument("clahe: empty image");
  if (clip_limit <= 0.0 || tiles_x < 1 || tiles_y < 1)
    throw std::invalid_argument("clahe: bad parameters");
  if (img.width < tiles_x || img.height < tiles_y)
    return equalize_histogram(img);

  const int w = img.width, h = img.height;
  std::vector<int> bx(tiles_x + 1), by(tiles_y + 1);
  for (int i = 0; i <= tiles_x; ++i)
    bx[i] = static_cast<int>(std::lround(static_cast<double>(i) * w / tiles_x));
  for (int j = 0; j <= tiles_y; ++j)
    by[j] = static_cast<int>(std::lround(static_cast<double>(j) * h / tiles_y));

  std::vector<std::array<std::uint8_t, 256>> luts(
      static_cast<std::size_t>(tiles_x) * tiles_y);
  std::vector<double> cx(tiles_x), cy(tiles_y);

  for (int ty = 0; ty < tiles_y; ++ty) {
    for (int tx = 0; tx < tiles_x; ++tx) {
      std::array<std::int64_t, 256> hist{};
      std::int64_t n = 0;
      for (int y = by[ty]; y < by[ty + 1]; ++y)
        for (int x = bx[tx]; x < bx[tx + 1]; ++x) {
          ++hist[img.at(x, y)];
          ++n;
        }
      cx[tx] = (bx[tx] + bx[tx + 1] - 1) / 2.0;
      cy[ty] = (by[ty] + by[ty + 1] - 1) / 2.0;

      int occupied = 0;
      for (int i = 0; i < 256; ++i) occupied += hist[i] > 0;
      auto& lut = luts[static_cast<std::size_t>(ty) * tiles_x + tx];
      if (occupied <= 1) {
        for (int i = 0; i < 256; ++i) lut[i] = static_cast<std::uint8_t>(i);
        continue;
      }

      const std::int64_t limit = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(std::lround(clip_limit * n / 256.0)));
      std::int64_t excess = 0;
      for (int i = 0; i < 256; ++i)
        if (hist[i] > limit) {
          excess += hist[i] - limit;
          hist[i] = limit;
        }
      const std::int64_t base = excess / 256;
      const int rem = static_cast<int>(excess % 256);
      for (int i = 0; i < 256; ++i) hist[i] += base + (i < rem ? 1 : 0);

      lut = detail::equalization_lut(hist, n);
    }
  }

  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    // vertical blend setup
    int ty0 = tiles_y - 1;
    for (int j = 0; j < tiles_y; ++j)
      if (cy[j] > y) { ty0 = j - 1; break; }
    int ty1 = ty0 + 1;
    double wy = 0.0;
    if (ty0 < 0) { ty0 = ty1 = 0; }
    else if (ty1 >= tiles_y) { ty1 = ty0; }
    else wy = (y - cy[ty0]) / (cy[ty1] - cy[ty0]);

    for (int x = 0; x < w; ++x) {
      int tx0 = tiles_x - 1;
      for (int i = 0; i < tiles_x; ++i)
        if (cx[i] > x) { tx0 = i - 1; break; }
      int tx1 = tx0 + 1;
      double wx = 0.0;
      if (tx0 < 0) { tx0 = tx1 = 0; }
      else if (tx1 >= tiles_x) { tx1 = tx0; }
      else wx = (x - cx[tx0]) / (cx[tx1] - cx[tx0]);

      const std::uint8_t v = img.at(x, y);
      const double v00 = luts[static_cast<std::size_t>(ty0) * tiles_x + tx0][v];
      const double v01 = luts[static_cast<std::size_t>(ty0) * tiles_x + tx1][v];
      const double v10 = luts[static_cast<std::size_t>(ty1) * tiles_x + tx0][v];
      const double v11 = luts[static_cast<std::size_t>(ty1) * tiles_x + tx1][v];
      const double top = v00 * (1.0 - wx) + v01 * wx;
      const double bot = v10 * (1.0 - wx) + v11 * wx;
      out.at(x, y) = round_u8(top * (1.0 - wy) + bot * wy);
    }
  }
  return out;
}

}  // namespace lpr
