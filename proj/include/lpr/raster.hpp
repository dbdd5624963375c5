#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lpr {

// Single-channel 8-bit image, row-major, top row first.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Raster() = default;
  Raster(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h),
        data(static_cast<std::size_t>(w < 0 || h < 0 ? 0 : w) *
                 static_cast<std::size_t>(h < 0 ? 0 : h),
             fill) {
    if (w < 0 || h < 0)
      throw std::invalid_argument("Raster: negative dimensions");
  }

  bool empty() const { return width <= 0 || height <= 0; }
  std::size_t size() const { return data.size(); }

  std::uint8_t& at(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  // Edge-replicated access: coordinates clamp to the valid range.
  std::uint8_t at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return at(x, y);
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }

  friend bool operator==(const Raster& a, const Raster& b) {
    return a.width == b.width && a.height == b.height && a.data == b.data;
  }
};

// Interleaved RGB, 8 bits per channel.
struct RgbRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 3 * width * height

  RgbRaster() = default;
  RgbRaster(int w, int h) : width(w), height(h) {
    if (w < 0 || h < 0)
      throw std::invalid_argument("RgbRaster: negative dimensions");
    data.assign(static_cast<std::size_t>(w) * h * 3, 0);
  }
  const std::uint8_t* px(int x, int y) const {
    return &data[(static_cast<std::size_t>(y) * width + x) * 3];
  }
  std::uint8_t* px(int x, int y) {
    return &data[(static_cast<std::size_t>(y) * width + x) * 3];
  }
};

inline std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

inline std::uint8_t round_u8(double v) {
  return clamp_u8(std::floor(v + 0.5));
}

// ITU-R BT.601 luma, rounded to nearest.
inline Raster to_grayscale(const RgbRaster& rgb) {
  Raster out(rgb.width, rgb.height);
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x) {
      const std::uint8_t* p = rgb.px(x, y);
      out.at(x, y) = round_u8(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
    }
  return out;
}

// Bilinear sample at real coordinates; integer pixel (x, y) is the sample
// located exactly at (x, y). Coordinates clamp to the image border.
inline double sample_bilinear(const Raster& img, double x, double y) {
  if (img.empty()) throw std::invalid_argument("sample_bilinear: empty image");
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  int x0 = static_cast<int>(x);
  int y0 = static_cast<int>(y);
  int x1 = std::min(x0 + 1, img.width - 1);
  int y1 = std::min(y0 + 1, img.height - 1);
  double fx = x - x0, fy = y - y0;
  double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
  double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
  return top * (1.0 - fy) + bot * fy;
}

}  // namespace lpr
