#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lpr/raster.hpp"

namespace lpr {

namespace detail {

// Rectangular structuring element with anchor (kw/2, kh/2). Erosion takes
// the minimum over the footprint, dilation the maximum over the *reflected*
// footprint, so erode/dilate form an adjunction and open/close are exactly
// idempotent even for even-sized kernels. Outside the image is background
// for both operations. Rectangles decompose into two 1-D passes.
inline void line_min(const std::uint8_t* in, std::uint8_t* out, int n,
                     int stride, int lo, int hi) {
  for (int i = 0; i < n; ++i) {
    std::uint8_t m = 255;
    for (int k = lo; k <= hi; ++k) {
      int j = i + k;
      std::uint8_t v = (j < 0 || j >= n) ? 0 : in[j * stride];
      m = std::min(m, v);
      if (m == 0) break;
    }
    out[i * stride] = m;
  }
}

inline void line_max(const std::uint8_t* in, std::uint8_t* out, int n,
                     int stride, int lo, int hi) {
  for (int i = 0; i < n; ++i) {
    std::uint8_t m = 0;
    for (int k = lo; k <= hi; ++k) {
      int j = i + k;
      if (j < 0 || j >= n) continue;  // background contributes nothing
      m = std::max(m, in[j * stride]);
      if (m == 255) break;
    }
    out[i * stride] = m;
  }
}

enum class MorphPass { erode, dilate };

// Sliding-window extreme in O(1) amortized per sample (van Herk /
// Gil-Werman): the zero-padded line is split into window-sized blocks with
// running prefix/suffix extremes; each window is the combination of one
// suffix and one prefix. Zero padding realizes the outside-is-background
// convention for both passes (forces erosion minima to 0, is neutral for
// dilation maxima). Scratch buffers are caller-owned to amortize
// allocation across lines.
struct MorphScratch {
  std::vector<std::uint8_t> pad, pre, suf;
};

template <bool kIsMin>
inline void line_extreme_vh(const std::uint8_t* in, std::uint8_t* out, int n,
                            int stride, int lo, int hi, MorphScratch& s) {
  const int window = hi - lo + 1;
  const int pad_l = -lo;  // lo <= 0 <= hi for both scan directions
  const int len = n + window - 1;
  s.pad.resize(len);
  s.pre.resize(len);
  s.suf.resize(len);
  for (int j = 0; j < len; ++j) {
    const int src = j - pad_l;
    s.pad[j] = (src >= 0 && src < n) ? in[static_cast<std::size_t>(src) * stride]
                                     : 0;
  }
  auto op = [](std::uint8_t a, std::uint8_t b) {
    return kIsMin ? std::min(a, b) : std::max(a, b);
  };
  for (int block = 0; block < len; block += window) {
    const int end = std::min(block + window, len) - 1;
    s.pre[block] = s.pad[block];
    for (int j = block + 1; j <= end; ++j)
      s.pre[j] = op(s.pre[j - 1], s.pad[j]);
    s.suf[end] = s.pad[end];
    for (int j = end - 1; j >= block; --j)
      s.suf[j] = op(s.suf[j + 1], s.pad[j]);
  }
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i) * stride] = op(s.suf[i], s.pre[i + window - 1]);
}

inline void morph_line(const std::uint8_t* in, std::uint8_t* out, int n,
                       int stride, int lo, int hi, MorphPass pass,
                       MorphScratch& s) {
  // The brute-force scan with its early exits wins for small windows;
  // the block algorithm takes over once the window cost dominates.
  constexpr int kDirectLimit = 15;
  if (hi - lo + 1 <= kDirectLimit) {
    if (pass == MorphPass::erode)
      line_min(in, out, n, stride, lo, hi);
    else
      line_max(in, out, n, stride, lo, hi);
    return;
  }
  if (pass == MorphPass::erode)
    line_extreme_vh<true>(in, out, n, stride, lo, hi, s);
  else
    line_extreme_vh<false>(in, out, n, stride, lo, hi, s);
}

inline Raster morph(const Raster& img, int kw, int kh, MorphPass pass) {
  if (img.empty()) throw std::invalid_argument("morphology: empty image");
  if (kw < 1 || kh < 1)
    throw std::invalid_argument("morphology: kernel must be >= 1x1");
  const int ax = kw / 2, ay = kh / 2;
  // erode scans offsets [-a, k-1-a]; dilate scans the reflection.
  int lo_x = -ax, hi_x = kw - 1 - ax;
  int lo_y = -ay, hi_y = kh - 1 - ay;
  if (pass == MorphPass::dilate) {
    lo_x = -(kw - 1 - ax); hi_x = ax;
    lo_y = -(kh - 1 - ay); hi_y = ay;
  }

  MorphScratch scratch;
  Raster tmp(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    const std::uint8_t* in = &img.data[static_cast<std::size_t>(y) * img.width];
    std::uint8_t* out = &tmp.data[static_cast<std::size_t>(y) * img.width];
    morph_line(in, out, img.width, 1, lo_x, hi_x, pass, scratch);
  }
  Raster dst(img.width, img.height);
  for (int x = 0; x < img.width; ++x) {
    const std::uint8_t* in = &tmp.data[x];
    std::uint8_t* out = &dst.data[x];
    morph_line(in, out, img.height, img.width, lo_y, hi_y, pass, scratch);
  }
  return dst;
}

}  // namespace detail

inline Raster erode(const Raster& img, int kw, int kh) {
  return detail::morph(img, kw, kh, detail::MorphPass::erode);
}

inline Raster dilate(const Raster& img, int kw, int kh) {
  return detail::morph(img, kw, kh, detail::MorphPass::dilate);
}

inline Raster morph_open(const Raster& img, int kw, int kh) {
  return dilate(erode(img, kw, kh), kw, kh);
}

inline Raster morph_close(const Raster& img, int kw, int kh) {
  return erode(dilate(img, kw, kh), kw, kh);
}

}  // namespace lpr
