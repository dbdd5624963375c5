#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lpr/edges.hpp"
#include "lpr/hough.hpp"
#include "lpr/ranging.hpp"
#include "lpr/raster.hpp"

namespace lpr {

struct PoseConfig {
  double canny_low = 50.0;
  double canny_high = 150.0;
  double rho_res = 1.0;
  double theta_res = 0.017453292519943295;  // 1 degree
  int votes_min = 50;
  double max_line_angle = 0.7853981633974483;  // 45 degrees
};

struct PoseEstimate {
  double pitch_rad = 0.0;
  double roll_rad = 0.0;
  bool valid = false;
  int n_lines = 0;          // near-horizontal structure lines used
  int n_intersections = 0;  // finite pairwise intersections
};

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Intersection of the infinite lines through two segments. Returns false
// for (near-)parallel lines.
inline bool line_intersection(const LineSegment& a, const LineSegment& b,
                              Vec2& out) {
  const Vec2 da{a.p2.x - a.p1.x, a.p2.y - a.p1.y};
  const Vec2 db{b.p2.x - b.p1.x, b.p2.y - b.p1.y};
  const double den = da.x * db.y - da.y * db.x;
  if (std::abs(den) < 1e-9) return false;
  const Vec2 d{b.p1.x - a.p1.x, b.p1.y - a.p1.y};
  const double t = (d.x * db.y - d.y * db.x) / den;
  out = Vec2{a.p1.x + t * da.x, a.p1.y + t * da.y};
  return true;
}

}  // namespace detail

// Camera-to-road pose from lane-like structure: edges are extracted, long
// straight lines fitted, and steep lines discarded. The remaining lines'
// pairwise intersections vote for the vanishing point; the median
// intersection row against the principal row gives the pitch angle, and
// the mean line inclination gives the roll angle. Fewer than two usable
// lines, or no finite intersection, yields an invalid estimate.
inline PoseEstimate estimate_pose(const Raster& frame, const CameraModel& cam,
                                  const PoseConfig& cfg = {}) {
  PoseEstimate pose;
  if (frame.empty()) return pose;

  const Raster edge_map = canny(frame, cfg.canny_low, cfg.canny_high);
  const std::vector<LineSegment> all =
      hough_lines(edge_map, cfg.rho_res, cfg.theta_res, cfg.votes_min);

  std::vector<LineSegment> lines;
  for (const LineSegment& l : all)
    if (std::abs(l.angle) < cfg.max_line_angle) lines.push_back(l);
  pose.n_lines = static_cast<int>(lines.size());
  if (lines.size() < 2) return pose;

  std::vector<double> rows;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      Vec2 p;
      if (detail::line_intersection(lines[i], lines[j], p)) rows.push_back(p.y);
    }
  pose.n_intersections = static_cast<int>(rows.size());
  if (rows.empty()) return pose;

  const double v_inf = detail::median_of(std::move(rows));
  pose.pitch_rad = std::atan((v_inf - cam.v0) / cam.f_px);

  double angle_sum = 0.0;
  for (const LineSegment& l : lines) angle_sum += l.angle;
  pose.roll_rad = angle_sum / static_cast<double>(lines.size());
  pose.valid = true;
  return pose;
}

struct HeightCorrection {
  double value = 0.0;
  bool applied = false;
};

// Re-projects an apparent pixel height from the current camera pose to a
// perturbed pose. With zero perturbation the input is returned exactly.
// When any involved direction cosine collapses (grazing angles) or the
// pose is invalid, the height is passed through unmodified.
inline HeightCorrection correct_height(double height_px,
                                       const PoseEstimate& pose,
                                       double delta_pitch_rad,
                                       double delta_roll_rad) {
  HeightCorrection out{height_px, false};
  if (!pose.valid) return out;
  const double cp = std::cos(pose.pitch_rad);
  const double cr = std::cos(pose.roll_rad);
  const double cp2 = std::cos(pose.pitch_rad + delta_pitch_rad);
  const double cr2 = std::cos(pose.roll_rad + delta_roll_rad);
  const double kMinCos = 0.1;
  if (cp < kMinCos || cr < kMinCos || cp2 < kMinCos || cr2 < kMinCos)
    return out;
  out.value = height_px * (cp * cr) / (cp2 * cr2);
  out.applied = true;
  return out;
}

}  // namespace lpr
