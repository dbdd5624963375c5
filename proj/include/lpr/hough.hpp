#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lpr/geometry.hpp"
#include "lpr/raster.hpp"

namespace lpr {

// Line reported by the Hough transform, clipped to the image rectangle.
// angle is the direction of the line measured from the image x axis,
// normalized to (-pi/2, pi/2].
struct LineSegment {
  Vec2 p1, p2;
  double angle = 0.0;
  int votes = 0;

  static double angle_from_endpoints(Vec2 a, Vec2 b) {
    double ang = std::atan2(b.y - a.y, b.x - a.x);
    const double half_pi = 1.57079632679489661923;
    while (ang > half_pi) ang -= 2.0 * half_pi;
    while (ang <= -half_pi) ang += 2.0 * half_pi;
    return ang;
  }
};

namespace detail {

// Clip the infinite line x cos(theta) + y sin(theta) = rho to the rectangle
// [0, w-1] x [0, h-1]; empty when the line misses the rectangle.
inline std::optional<std::pair<Vec2, Vec2>> clip_line(double rho, double theta,
                                                      int w, int h) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Vec2 base{rho * c, rho * s};
  const Vec2 dir{-s, c};
  const double x1 = w - 1.0, y1 = h - 1.0;

  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  // Liang-Barsky parameter clipping against each half-plane
  // (constraint form: t * denom >= numer)
  auto clip1 = [&](double denom, double numer) {
    if (std::abs(denom) < 1e-12) return numer <= 0.0;  // parallel: inside?
    const double t = numer / denom;
    if (denom > 0.0)
      t0 = std::max(t0, t);
    else
      t1 = std::min(t1, t);
    return true;
  };
  // x >= 0: base.x + t*dir.x >= 0
  if (!clip1(dir.x, -base.x)) return std::nullopt;
  // x <= x1
  if (!clip1(-dir.x, base.x - x1)) return std::nullopt;
  if (!clip1(dir.y, -base.y)) return std::nullopt;
  if (!clip1(-dir.y, base.y - y1)) return std::nullopt;
  if (t0 > t1) return std::nullopt;
  return std::make_pair(base + dir * t0, base + dir * t1);
}

}  // namespace detail

// Standard rho-theta accumulator. theta spans [0, pi) in theta_res steps,
// rho spans [-diag, diag] in rho_res steps. Cells with at least votes_min
// votes that are 3x3 local maxima (earlier cells win ties) are reported,
// strongest first.
inline std::vector<LineSegment> hough_lines(const Raster& edges,
                                            double rho_res = 1.0,
                                            double theta_res =
                                                3.14159265358979323846 / 180.0,
                                            int votes_min = 50) {
  if (edges.empty()) throw std::invalid_argument("hough_lines: empty image");
  if (rho_res <= 0.0 || theta_res <= 0.0 || votes_min < 1)
    throw std::invalid_argument("hough_lines: bad parameters");

  const double pi = 3.14159265358979323846;
  const int n_theta = std::max(1, static_cast<int>(std::lround(pi / theta_res)));
  const double diag = std::hypot(edges.width, edges.height);
  const int n_rho = 2 * static_cast<int>(std::ceil(diag / rho_res)) + 1;
  const int rho_mid = n_rho / 2;

  std::vector<double> cs(n_theta), sn(n_theta);
  for (int t = 0; t < n_theta; ++t) {
    cs[t] = std::cos(t * theta_res);
    sn[t] = std::sin(t * theta_res);
  }

  std::vector<std::int32_t> acc(static_cast<std::size_t>(n_theta) * n_rho, 0);
  for (int y = 0; y < edges.height; ++y)
    for (int x = 0; x < edges.width; ++x) {
      if (edges.at(x, y) == 0) continue;
      for (int t = 0; t < n_theta; ++t) {
        const double rho = x * cs[t] + y * sn[t];
        const int r = static_cast<int>(std::lround(rho / rho_res)) + rho_mid;
        ++acc[static_cast<std::size_t>(t) * n_rho + r];
      }
    }

  auto acc_at = [&](int t, int r) -> std::int32_t {
    if (t < 0 || r < 0 || t >= n_theta || r >= n_rho) return 0;
    return acc[static_cast<std::size_t>(t) * n_rho + r];
  };

  std::vector<LineSegment> lines;
  for (int t = 0; t < n_theta; ++t)
    for (int r = 0; r < n_rho; ++r) {
      const std::int32_t v = acc_at(t, r);
      if (v < votes_min) continue;
      bool is_peak = true;
      for (int dt = -1; dt <= 1 && is_peak; ++dt)
        for (int dr = -1; dr <= 1 && is_peak; ++dr) {
          if (dt == 0 && dr == 0) continue;
          const std::int32_t nv = acc_at(t + dt, r + dr);
          if (nv > v || (nv == v && (dt < 0 || (dt == 0 && dr < 0))))
            is_peak = false;  // ties go to the earlier cell
        }
      if (!is_peak) continue;
      auto seg = detail::clip_line((r - rho_mid) * rho_res, t * theta_res,
                                   edges.width, edges.height);
      if (!seg) continue;
      LineSegment ls;
      ls.p1 = seg->first;
      ls.p2 = seg->second;
      ls.angle = LineSegment::angle_from_endpoints(ls.p1, ls.p2);
      ls.votes = v;
      lines.push_back(ls);
    }

  std::stable_sort(lines.begin(), lines.end(),
                   [](const LineSegment& a, const LineSegment& b) {
                     return a.votes > b.votes;
                   });
  return lines;
}

}  // namespace lpr
