#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "lpr/geometry.hpp"
#include "lpr/homography.hpp"
#include "lpr/raster.hpp"

namespace lpr {

// Parameters of one synthetic road frame: a fronto-parallel plate carrying
// ring glyphs, optional converging lane strips for pose structure, and the
// pinhole camera observing them. World frame: x right, y down, z forward;
// camera at the origin. The camera is rolled then pitched relative to the
// world, so a positive pitch raises the vanishing point below the
// principal row by f * tan(pitch).
struct SceneSpec {
  int image_width = 1280;
  int image_height = 720;
  double f_px = 1000.0;
  double u0 = -1.0;  // < 0 selects the image center
  double v0 = -1.0;

  double distance_m = 20.0;   // plate center depth
  double lateral_m = 0.0;     // plate center x
  double vertical_m = 0.3;    // plate center y (down positive)
  double pitch_rad = 0.0;     // camera pitch (down positive)
  double roll_rad = 0.0;      // camera roll

  double plate_width_m = 0.305;
  double plate_height_m = 0.152;
  double char_height_m = 0.075;
  double char_width_factor = 0.42;  // glyph outer width / glyph height
  double stroke_width_m = 0.008;
  double char_spacing_m = 0.010;
  double border_thickness_m = 0.005;
  int n_chars = 7;

  bool draw_plate = true;
  bool draw_lanes = false;
  double camera_height_m = 1.4;  // ground plane at y = camera_height_m
  double lane_offset_m = 1.8;    // lane strip centers at +-offset
  double lane_width_m = 0.12;
  double lane_near_m = 4.0;
  double lane_far_m = 80.0;

  // The background sits brighter than the plate body. The strong dark
  // features are then the glyphs and the border, and the adaptive
  // threshold's dark halo around the plate boundary forms just inside the
  // plate (merging with the flush border) instead of spilling outward,
  // which keeps the detected outline on the true plate edge.
  double background = 240.0;
  double plate_intensity = 225.0;
  double ink_intensity = 25.0;
  double lane_intensity = 30.0;

  double blur_sigma = 0.0;
  double noise_sigma = 0.0;
  std::uint32_t seed = 1;
};

// Exact projected measurements of one glyph.
struct CharGlyphTruth {
  std::array<Vec2, 4> corners;  // outer rectangle, tl/tr/br/bl
  double local_x = 0.0;         // plate-local outer rectangle, meters
  double local_y = 0.0;
  double local_w = 0.0;
  double local_h = 0.0;
  double top_v = 0.0;           // mean row of the two upper corners
  double bottom_v = 0.0;        // mean row of the two lower corners
  double height_px = 0.0;       // mean projected side height
  double width_px = 0.0;        // mean projected side width
  double ink_area_px2 = 0.0;    // projected ring area
};

struct SceneTruth {
  std::array<Vec2, 4> plate_corners;  // tl/tr/br/bl
  double plate_height_px = 0.0;
  double plate_top_width_px = 0.0;
  double plate_bottom_width_px = 0.0;
  double plate_width_px = 0.0;
  std::vector<CharGlyphTruth> chars;
  double mean_char_height_px = 0.0;
  double chars_ink_area_px2 = 0.0;   // all glyph rings
  double border_ink_area_px2 = 0.0;  // plate border ring
  double glyph_ink_area_m2 = 0.0;    // world ink area of a single glyph
  double distance_m = 0.0;
  double velocity_mps = 0.0;  // filled by sequence rendering
  double pitch_rad = 0.0;
  double roll_rad = 0.0;
  double f_px = 0.0;
  double u0 = 0.0;
  double v0 = 0.0;
  Homography plate_to_image;  // plate-local meters -> image pixels
};

struct RenderedScene {
  Raster image;
  SceneTruth truth;
};

namespace detail {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

// Combined camera rotation: roll about the optical axis composed with
// pitch about the lateral axis, p_cam = R_z(roll) * R_x(-pitch) * p_world.
struct CameraRotation {
  double r[3][3];

  CameraRotation(double pitch, double roll) {
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cr = std::cos(roll), sr = std::sin(roll);
    r[0][0] = cr;  r[0][1] = -sr * cp; r[0][2] = -sr * sp;
    r[1][0] = sr;  r[1][1] = cr * cp;  r[1][2] = cr * sp;
    r[2][0] = 0.0; r[2][1] = -sp;      r[2][2] = cp;
  }

  Vec3 apply(Vec3 p) const {
    return {r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z};
  }
};

struct PinholeProjector {
  double f, u0, v0;
  CameraRotation rot;

  Vec2 project(Vec3 world) const {
    const Vec3 c = rot.apply(world);
    if (c.z < 1e-9)
      throw std::invalid_argument("render_scene: geometry behind the camera");
    return {u0 + f * c.x / c.z, v0 + f * c.y / c.z};
  }
};

// A convex quad in image space with exact pixel-coverage queries. Axis
// aligned quads use interval overlap; rotated quads fall back to polygon
// clipping, with an all-corners-inside fast path for interior pixels.
struct PaintQuad {
  std::array<Vec2, 4> pts;
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool axis_aligned = false;
  double winding = 1.0;

  explicit PaintQuad(const std::array<Vec2, 4>& p) : pts(p) {
    min_x = max_x = p[0].x;
    min_y = max_y = p[0].y;
    for (int i = 1; i < 4; ++i) {
      min_x = std::min(min_x, p[i].x);
      max_x = std::max(max_x, p[i].x);
      min_y = std::min(min_y, p[i].y);
      max_y = std::max(max_y, p[i].y);
    }
    axis_aligned = p[0].y == p[1].y && p[2].y == p[3].y &&
                   p[0].x == p[3].x && p[1].x == p[2].x;
    const double area = signed_area({p[0], p[1], p[2], p[3]});
    winding = area >= 0.0 ? 1.0 : -1.0;
  }

  bool contains(Vec2 q) const {
    for (int i = 0; i < 4; ++i) {
      const Vec2& a = pts[i];
      const Vec2& b = pts[(i + 1) % 4];
      if (winding * cross(b - a, q - a) < 0.0) return false;
    }
    return true;
  }

  // Overlap area with the unit pixel [px, px+1] x [py, py+1].
  double coverage(double px, double py) const {
    if (px + 1.0 <= min_x || px >= max_x || py + 1.0 <= min_y ||
        py >= max_y)
      return 0.0;
    if (axis_aligned) {
      const double ox =
          std::min(px + 1.0, max_x) - std::max(px, min_x);
      const double oy =
          std::min(py + 1.0, max_y) - std::max(py, min_y);
      return std::max(0.0, ox) * std::max(0.0, oy);
    }
    if (contains({px, py}) && contains({px + 1.0, py}) &&
        contains({px + 1.0, py + 1.0}) && contains({px, py + 1.0}))
      return 1.0;
    return clipped_polygon_area({pts[0], pts[1], pts[2], pts[3]}, px, py,
                                px + 1.0, py + 1.0);
  }
};

inline double quad_area(const std::array<Vec2, 4>& p) {
  return std::abs(signed_area({p[0], p[1], p[2], p[3]}));
}

// Separable Gaussian blur on a double image, replicated edges. Radius is
// three sigma, rounded up.
inline void gaussian_blur_inplace(std::vector<double>& img, int w, int h,
                                  double sigma) {
  if (sigma <= 0.0) return;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    total += taps[i + radius];
  }
  for (double& t : taps) t /= total;

  std::vector<double> tmp(img.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += taps[i + radius] * img[static_cast<std::size_t>(y) * w + xx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += taps[i + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      img[static_cast<std::size_t>(y) * w + x] = acc;
    }
}

// Standard-normal sampler: Box-Muller over mt19937 words. The transform is
// done by hand so sequences are identical across standard libraries.
struct GaussianSampler {
  std::mt19937 rng;
  double spare = 0.0;
  bool has_spare = false;

  explicit GaussianSampler(std::uint32_t seed) : rng(seed) {}

  double operator()() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    const double u1 = (static_cast<double>(rng()) + 0.5) / 4294967296.0;
    const double u2 = (static_cast<double>(rng()) + 0.5) / 4294967296.0;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare = r * std::sin(a);
    has_spare = true;
    return r * std::cos(a);
  }
};

}  // namespace detail

// Renders the scene with exact area-coverage anti-aliasing: every painted
// region projects to a convex polygon, and each pixel receives intensities
// weighted by its exact overlap with those polygons. Composition happens
// in double precision; optional Gaussian blur and seeded Gaussian noise
// are applied before quantization. The returned truth carries exact
// projected geometry, independent of the raster.
inline RenderedScene render_scene(const SceneSpec& spec) {
  if (spec.image_width < 1 || spec.image_height < 1)
    throw std::invalid_argument("render_scene: bad image size");
  if (spec.distance_m <= 0.0)
    throw std::invalid_argument("render_scene: distance must be > 0");
  if (spec.n_chars < 1)
    throw std::invalid_argument("render_scene: need at least one glyph");

  const double u0 =
      spec.u0 >= 0.0 ? spec.u0 : (spec.image_width - 1) / 2.0;
  const double v0 =
      spec.v0 >= 0.0 ? spec.v0 : (spec.image_height - 1) / 2.0;
  const detail::PinholeProjector proj{
      spec.f_px, u0, v0,
      detail::CameraRotation(spec.pitch_rad, spec.roll_rad)};

  const double W = spec.plate_width_m;
  const double H = spec.plate_height_m;
  const double char_w = spec.char_width_factor * spec.char_height_m;
  const double glyph_row_w =
      spec.n_chars * char_w + (spec.n_chars - 1) * spec.char_spacing_m;
  if (glyph_row_w > W - 2.0 * spec.border_thickness_m ||
      spec.char_height_m > H - 2.0 * spec.border_thickness_m)
    throw std::invalid_argument("render_scene: glyphs do not fit the plate");

  // Plate-local rectangle (meters, origin at plate top-left) -> image quad.
  const Vec2 plate_origin{spec.lateral_m - W / 2.0,
                          spec.vertical_m - H / 2.0};
  auto project_local = [&](double s, double t) {
    return proj.project(
        {plate_origin.x + s, plate_origin.y + t, spec.distance_m});
  };
  auto local_rect = [&](double s, double t, double w,
                        double h) -> std::array<Vec2, 4> {
    return {project_local(s, t), project_local(s + w, t),
            project_local(s + w, t + h), project_local(s, t + h)};
  };

  const std::array<Vec2, 4> plate_q = local_rect(0.0, 0.0, W, H);
  for (const Vec2& c : plate_q)
    if (c.x < 0.0 || c.y < 0.0 || c.x > spec.image_width - 1.0 ||
        c.y > spec.image_height - 1.0)
      throw std::invalid_argument(
          "render_scene: plate projects outside the frame");
  const double b = spec.border_thickness_m;
  const std::array<Vec2, 4> border_inner_q =
      local_rect(b, b, W - 2.0 * b, H - 2.0 * b);

  const double t0 = (H - spec.char_height_m) / 2.0;
  const double s0 = (W - glyph_row_w) / 2.0;
  const double stroke = spec.stroke_width_m;

  SceneTruth truth;
  truth.plate_corners = plate_q;
  truth.distance_m = spec.distance_m;
  truth.pitch_rad = spec.pitch_rad;
  truth.roll_rad = spec.roll_rad;
  truth.f_px = spec.f_px;
  truth.u0 = u0;
  truth.v0 = v0;
  truth.plate_height_px = 0.5 * (norm(plate_q[3] - plate_q[0]) +
                                 norm(plate_q[2] - plate_q[1]));
  truth.plate_top_width_px = norm(plate_q[1] - plate_q[0]);
  truth.plate_bottom_width_px = norm(plate_q[2] - plate_q[3]);
  truth.plate_width_px =
      0.5 * (truth.plate_top_width_px + truth.plate_bottom_width_px);
  truth.border_ink_area_px2 =
      detail::quad_area(plate_q) - detail::quad_area(border_inner_q);
  truth.glyph_ink_area_m2 =
      char_w * spec.char_height_m -
      (char_w - 2.0 * stroke) * (spec.char_height_m - 2.0 * stroke);

  std::vector<detail::PaintQuad> glyph_outer, glyph_inner;
  for (int i = 0; i < spec.n_chars; ++i) {
    const double sx = s0 + i * (char_w + spec.char_spacing_m);
    const std::array<Vec2, 4> outer =
        local_rect(sx, t0, char_w, spec.char_height_m);
    const std::array<Vec2, 4> inner =
        local_rect(sx + stroke, t0 + stroke, char_w - 2.0 * stroke,
                   spec.char_height_m - 2.0 * stroke);
    glyph_outer.emplace_back(outer);
    glyph_inner.emplace_back(inner);

    CharGlyphTruth ct;
    ct.corners = outer;
    ct.local_x = sx;
    ct.local_y = t0;
    ct.local_w = char_w;
    ct.local_h = spec.char_height_m;
    ct.top_v = 0.5 * (outer[0].y + outer[1].y);
    ct.bottom_v = 0.5 * (outer[2].y + outer[3].y);
    ct.height_px =
        0.5 * (norm(outer[3] - outer[0]) + norm(outer[2] - outer[1]));
    ct.width_px =
        0.5 * (norm(outer[1] - outer[0]) + norm(outer[2] - outer[3]));
    ct.ink_area_px2 = detail::quad_area(outer) - detail::quad_area(inner);
    truth.chars_ink_area_px2 += ct.ink_area_px2;
    truth.mean_char_height_px += ct.height_px;
    truth.chars.push_back(ct);
  }
  truth.mean_char_height_px /= spec.n_chars;

  {
    // Analytic plate-plane homography K * R * [e1 e2 c], independent of
    // the point-correspondence solver used elsewhere.
    const auto& r = proj.rot.r;
    const detail::Vec3 c{plate_origin.x, plate_origin.y, spec.distance_m};
    const detail::Vec3 rc = proj.rot.apply(c);
    const double f = spec.f_px;
    truth.plate_to_image = Homography(std::array<double, 9>{
        f * r[0][0] + u0 * r[2][0], f * r[0][1] + u0 * r[2][1],
        f * rc.x + u0 * rc.z,
        f * r[1][0] + v0 * r[2][0], f * r[1][1] + v0 * r[2][1],
        f * rc.y + v0 * rc.z,
        r[2][0], r[2][1], rc.z});
  }

  std::optional<detail::PaintQuad> plate_quad, border_inner;
  if (spec.draw_plate) {
    plate_quad.emplace(plate_q);
    border_inner.emplace(border_inner_q);
  }

  std::vector<detail::PaintQuad> lanes;
  if (spec.draw_lanes) {
    for (double side : {-1.0, 1.0}) {
      const double cx = side * spec.lane_offset_m;
      const double hw = spec.lane_width_m / 2.0;
      const double yg = spec.camera_height_m;
      lanes.emplace_back(std::array<Vec2, 4>{
          proj.project({cx - hw, yg, spec.lane_near_m}),
          proj.project({cx + hw, yg, spec.lane_near_m}),
          proj.project({cx + hw, yg, spec.lane_far_m}),
          proj.project({cx - hw, yg, spec.lane_far_m})});
    }
  }

  const int w = spec.image_width, h = spec.image_height;
  std::vector<double> img(static_cast<std::size_t>(w) * h, spec.background);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double px = x - 0.5, py = y - 0.5;  // pixel footprint origin
      double value = spec.background;
      for (const detail::PaintQuad& lane : lanes) {
        const double a = lane.coverage(px, py);
        if (a > 0.0) value += a * (spec.lane_intensity - value);
      }
      if (plate_quad) {
        const double a_plate = plate_quad->coverage(px, py);
        if (a_plate > 0.0) {
          double a_ink = a_plate - border_inner->coverage(px, py);
          for (std::size_t i = 0; i < glyph_outer.size(); ++i) {
            const double ao = glyph_outer[i].coverage(px, py);
            if (ao > 0.0) a_ink += ao - glyph_inner[i].coverage(px, py);
          }
          value = value * (1.0 - a_plate) +
                  spec.plate_intensity * (a_plate - a_ink) +
                  spec.ink_intensity * a_ink;
        }
      }
      img[static_cast<std::size_t>(y) * w + x] = value;
    }

  detail::gaussian_blur_inplace(img, w, h, spec.blur_sigma);

  if (spec.noise_sigma > 0.0) {
    detail::GaussianSampler noise(spec.seed);
    for (double& v : img) v += spec.noise_sigma * noise();
  }

  RenderedScene out;
  out.image = Raster(w, h);
  for (std::size_t i = 0; i < img.size(); ++i)
    out.image.data[i] = round_u8(img[i]);
  out.truth = std::move(truth);
  return out;
}

// Renders one frame per trajectory sample. Truth range rate comes from
// central differences over the given distances (one-sided at the ends),
// and each frame draws fresh noise from a per-frame seed.
inline std::vector<RenderedScene> render_sequence(
    const SceneSpec& spec, const std::vector<double>& distances, double dt) {
  if (distances.empty())
    throw std::invalid_argument("render_sequence: empty trajectory");
  if (dt <= 0.0) throw std::invalid_argument("render_sequence: dt must be > 0");
  for (double d : distances)
    if (d <= 0.0)
      throw std::invalid_argument("render_sequence: distances must be > 0");

  const int n = static_cast<int>(distances.size());
  std::vector<RenderedScene> frames;
  frames.reserve(distances.size());
  for (int i = 0; i < n; ++i) {
    SceneSpec s = spec;
    s.distance_m = distances[i];
    s.seed = spec.seed + static_cast<std::uint32_t>(i);
    RenderedScene f = render_scene(s);
    if (n == 1)
      f.truth.velocity_mps = 0.0;
    else if (i == 0)
      f.truth.velocity_mps = (distances[1] - distances[0]) / dt;
    else if (i == n - 1)
      f.truth.velocity_mps = (distances[i] - distances[i - 1]) / dt;
    else
      f.truth.velocity_mps = (distances[i + 1] - distances[i - 1]) / (2.0 * dt);
    frames.push_back(std::move(f));
  }
  return frames;
}

// Convenience wrapper: uniform approach at a constant range rate.
inline std::vector<RenderedScene> render_constant_velocity_sequence(
    const SceneSpec& spec, int n_frames, double dt, double velocity_mps) {
  if (n_frames < 1)
    throw std::invalid_argument("render_sequence: need at least one frame");
  std::vector<double> dist(n_frames);
  for (int i = 0; i < n_frames; ++i)
    dist[i] = spec.distance_m + velocity_mps * dt * i;
  return render_sequence(spec, dist, dt);
}

}  // namespace lpr
