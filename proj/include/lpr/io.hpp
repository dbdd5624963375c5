#pragma once

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lpr/fusion.hpp"
#include "lpr/ranging.hpp"
#include "lpr/raster.hpp"

namespace lpr {

namespace detail {

// Next whitespace-delimited token, skipping '#' comments (netpbm headers).
inline std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      break;
    }
  }
  while ((c = in.get()) != EOF && !std::isspace(c))
    tok.push_back(static_cast<char>(c));
  if (tok.empty()) throw std::runtime_error("image: truncated header");
  return tok;
}

inline int pnm_int(std::istream& in, const char* what) {
  const std::string tok = pnm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("image: bad ") + what + " '" + tok +
                             "'");
  }
}

inline void byteswap_f32(std::uint32_t& bits) {
  bits = ((bits & 0x000000FFu) << 24) | ((bits & 0x0000FF00u) << 8) |
         ((bits & 0x00FF0000u) >> 8) | ((bits & 0xFF000000u) >> 24);
}

}  // namespace detail

// Reads P2/P5 (grayscale) and P3/P6 (color) netpbm images; color input is
// reduced to luma. Sample values must fit one byte.
inline Raster read_image(std::istream& in) {
  const std::string magic = detail::pnm_token(in);
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6")
    throw std::runtime_error("image: unsupported format '" + magic + "'");
  const bool color = magic == "P3" || magic == "P6";
  const bool binary = magic == "P5" || magic == "P6";

  const int w = detail::pnm_int(in, "width");
  const int h = detail::pnm_int(in, "height");
  const int maxval = detail::pnm_int(in, "maxval");
  if (w < 1 || h < 1) throw std::runtime_error("image: bad dimensions");
  if (maxval < 1 || maxval > 255)
    throw std::runtime_error("image: unsupported maxval");

  const std::size_t samples =
      static_cast<std::size_t>(w) * h * (color ? 3 : 1);
  std::vector<std::uint8_t> raw(samples);
  if (binary) {
    // the token reader consumed the single whitespace after maxval, so the
    // stream already sits on the first sample byte
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(samples));
    if (static_cast<std::size_t>(in.gcount()) != samples)
      throw std::runtime_error("image: truncated pixel data");
  } else {
    for (std::size_t i = 0; i < samples; ++i) {
      const int v = detail::pnm_int(in, "sample");
      if (v < 0 || v > maxval) throw std::runtime_error("image: sample out of range");
      raw[i] = static_cast<std::uint8_t>(v);
    }
  }

  if (!color) {
    Raster out(w, h);
    out.data = std::move(raw);
    return out;
  }
  RgbRaster rgb(w, h);
  rgb.data = std::move(raw);
  return to_grayscale(rgb);
}

inline Raster read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_image(in);
}

inline void write_pgm(std::ostream& out, const Raster& img,
                      bool binary = true) {
  if (img.empty()) throw std::invalid_argument("write_pgm: empty image");
  out << (binary ? "P5" : "P2") << "\n"
      << img.width << " " << img.height << "\n255\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
  } else {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x)
        out << static_cast<int>(img.at(x, y)) << (x + 1 < img.width ? " " : "");
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("write_pgm: write failed");
}

inline void write_pgm(const std::string& path, const Raster& img,
                      bool binary = true) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_pgm(out, img, binary);
}

// Single-channel float map. Three header lines — the magic, "width height",
// and a scale whose sign selects the byte order (negative = little endian;
// the magnitude is not interpreted) — followed by row-major float32
// samples, top row first.
inline DepthMap read_depth_map(std::istream& in) {
  std::string magic;
  std::getline(in, magic);
  if (magic != "PF-GRAY")
    throw std::runtime_error("depth map: bad magic '" + magic + "'");
  int w = 0, h = 0;
  double scale = 0.0;
  {
    std::string line;
    std::getline(in, line);
    std::istringstream dims(line);
    if (!(dims >> w >> h) || w < 1 || h < 1)
      throw std::runtime_error("depth map: bad dimensions");
    std::getline(in, line);
    std::istringstream sc(line);
    if (!(sc >> scale) || scale == 0.0)
      throw std::runtime_error("depth map: bad scale");
  }
  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;

  DepthMap out(w, h);
  const std::size_t n = out.data.size();
  std::vector<std::uint32_t> bits(n);
  in.read(reinterpret_cast<char*>(bits.data()),
          static_cast<std::streamsize>(n * 4));
  if (static_cast<std::size_t>(in.gcount()) != n * 4)
    throw std::runtime_error("depth map: truncated sample data");
  for (std::size_t i = 0; i < n; ++i) {
    if (file_little != host_little) detail::byteswap_f32(bits[i]);
    float f;
    std::memcpy(&f, &bits[i], 4);
    out.data[i] = f;
  }
  return out;
}

inline DepthMap read_depth_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_depth_map(in);
}

// Some monocular estimators emit inverse depth (larger = nearer). Callers
// declare the convention at ingestion; values are flipped to depth-like
// here so everything downstream assumes larger = farther. Non-positive
// samples carry no usable ordering and map to 0.
inline DepthMap invert_depth(DepthMap depth) {
  for (float& v : depth.data) v = v > 0.0f ? 1.0f / v : 0.0f;
  return depth;
}

inline DepthMap read_depth_map(std::istream& in, bool inverse_depth) {
  DepthMap d = read_depth_map(in);
  return inverse_depth ? invert_depth(std::move(d)) : d;
}

inline DepthMap read_depth_map(const std::string& path, bool inverse_depth) {
  DepthMap d = read_depth_map(path);
  return inverse_depth ? invert_depth(std::move(d)) : d;
}

inline void write_depth_map(std::ostream& out, const DepthMap& depth) {
  if (depth.empty()) throw std::invalid_argument("write_depth_map: empty map");
  out << "PF-GRAY\n" << depth.width << " " << depth.height << "\n-1.0\n";
  const bool host_little = std::endian::native == std::endian::little;
  for (float f : depth.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    if (!host_little) detail::byteswap_f32(bits);
    out.write(reinterpret_cast<const char*>(&bits), 4);
  }
  if (!out) throw std::runtime_error("write_depth_map: write failed");
}

inline void write_depth_map(const std::string& path, const DepthMap& depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_depth_map(out, depth);
}

// key=value camera/plate description. '#' starts a comment, blank lines
// are skipped, later duplicates win.
inline std::map<std::string, double> read_profile(std::istream& in) {
  std::map<std::string, double> out;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("profile: line " + std::to_string(line_no) +
                               ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("profile: line " + std::to_string(line_no) +
                               ": empty key");
    try {
      std::size_t used = 0;
      const double v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      out[key] = v;
    } catch (const std::exception&) {
      throw std::runtime_error("profile: line " + std::to_string(line_no) +
                               ": bad value '" + val + "'");
    }
  }
  return out;
}

inline std::map<std::string, double> read_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_profile(in);
}

inline void write_profile(std::ostream& out,
                          const std::map<std::string, double>& values) {
  for (const auto& [k, v] : values) out << k << " = " << v << "\n";
  if (!out) throw std::runtime_error("write_profile: write failed");
}

// Applies profile keys onto a camera model. Unknown keys are rejected so
// that a typo cannot silently fall back to a default.
inline CameraModel camera_from_profile(
    const std::map<std::string, double>& values, CameraModel base = {}) {
  for (const auto& [k, v] : values) {
    if (k == "f_px") base.f_px = v;
    else if (k == "u0") base.u0 = v;
    else if (k == "v0") base.v0 = v;
    else if (k == "char_height_m") base.char_height_m = v;
    else if (k == "plate_height_m") base.plate_height_m = v;
    else if (k == "plate_width_m") base.plate_width_m = v;
    else if (k == "stroke_width_m") base.stroke_width_m = v;
    else if (k == "char_spacing_m") base.char_spacing_m = v;
    else if (k == "border_thickness_m") base.border_thickness_m = v;
    else
      throw std::runtime_error("profile: unknown key '" + k + "'");
  }
  return base;
}

}  // namespace lpr
