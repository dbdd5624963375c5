#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lpr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Integer pixel location (contours, flood regions).
struct Pt {
  int x = 0;
  int y = 0;
  friend bool operator==(Pt a, Pt b) { return a.x == b.x && a.y == b.y; }
};

// Axis-aligned integer rectangle, half-open is avoided on purpose: w and h
// count pixels, so the rightmost covered column is x + w - 1.
struct Rect {
  int x = 0, y = 0, w = 0, h = 0;
  int area() const { return w * h; }
  int right() const { return x + w; }   // one past
  int bottom() const { return y + h; }  // one past
};

// Rectangle with orientation. width/height follow the fitted box, angle is
// the rotation of the width axis from the image x axis, radians.
struct RotatedRect {
  Vec2 center;
  double width = 0.0;
  double height = 0.0;
  double angle = 0.0;

  std::array<Vec2, 4> corner_points() const {
    const double c = std::cos(angle), s = std::sin(angle);
    const Vec2 ex{c, s}, ey{-s, c};
    const Vec2 hw = ex * (width / 2.0), hh = ey * (height / 2.0);
    return {center - hw - hh, center + hw - hh, center + hw + hh,
            center - hw + hh};
  }
};

// Andrew monotone chain. Returns hull in counter-clockwise order for a
// y-up frame; with image y-down the winding flips, which is irrelevant to
// the caliper sweep below. Collinear points are dropped.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 &&
           cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0)
      --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t &&
           cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Minimum-area enclosing rectangle of a point set (rotating calipers over
// the convex hull: the optimum is aligned with some hull edge).
inline RotatedRect min_area_rect(const std::vector<Vec2>& points) {
  if (points.empty())
    throw std::invalid_argument("min_area_rect: empty point set");
  std::vector<Vec2> hull = convex_hull(points);
  if (hull.size() == 1) return RotatedRect{hull[0], 0.0, 0.0, 0.0};
  if (hull.size() == 2) {
    Vec2 d = hull[1] - hull[0];
    return RotatedRect{(hull[0] + hull[1]) * 0.5, norm(d), 0.0,
                       std::atan2(d.y, d.x)};
  }

  double best_area = std::numeric_limits<double>::infinity();
  RotatedRect best;
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 e = hull[(i + 1) % n] - hull[i];
    double len = norm(e);
    if (len == 0.0) continue;
    Vec2 u{e.x / len, e.y / len};       // edge direction
    Vec2 v{-u.y, u.x};                  // normal
    double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u;
    double lo_v = lo_u, hi_v = -lo_u;
    for (const Vec2& p : hull) {
      double pu = dot(p, u), pv = dot(p, v);
      lo_u = std::min(lo_u, pu); hi_u = std::max(hi_u, pu);
      lo_v = std::min(lo_v, pv); hi_v = std::max(hi_v, pv);
    }
    double area = (hi_u - lo_u) * (hi_v - lo_v);
    if (area < best_area) {
      best_area = area;
      double cu = (lo_u + hi_u) / 2.0, cv = (lo_v + hi_v) / 2.0;
      best.center = {u.x * cu + v.x * cv, u.y * cu + v.y * cv};
      best.width = hi_u - lo_u;
      best.height = hi_v - lo_v;
      best.angle = std::atan2(u.y, u.x);
    }
  }
  return best;
}

// Signed polygon area, shoelace. Positive for clockwise winding when the y
// axis points down (image convention).
inline double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return a / 2.0;
}

// Area of a convex polygon clipped to an axis-aligned box
// [x0,x1]x[y0,y1] (Sutherland–Hodgman, exact for convex input).
inline double clipped_polygon_area(std::vector<Vec2> poly, double x0,
                                   double y0, double x1, double y1) {
  auto clip = [](const std::vector<Vec2>& in, auto inside, auto intersect) {
    std::vector<Vec2> out;
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = in[i];
      const Vec2& b = in[(i + 1) % n];
      bool ia = inside(a), ib = inside(b);
      if (ia) {
        out.push_back(a);
        if (!ib) out.push_back(intersect(a, b));
      } else if (ib) {
        out.push_back(intersect(a, b));
      }
    }
    return out;
  };
  auto lerp_x = [](Vec2 a, Vec2 b, double x) {
    double t = (x - a.x) / (b.x - a.x);
    return Vec2{x, a.y + t * (b.y - a.y)};
  };
  auto lerp_y = [](Vec2 a, Vec2 b, double y) {
    double t = (y - a.y) / (b.y - a.y);
    return Vec2{a.x + t * (b.x - a.x), y};
  };
  poly = clip(poly, [&](Vec2 p) { return p.x >= x0; },
              [&](Vec2 a, Vec2 b) { return lerp_x(a, b, x0); });
  if (poly.empty()) return 0.0;
  poly = clip(poly, [&](Vec2 p) { return p.x <= x1; },
              [&](Vec2 a, Vec2 b) { return lerp_x(a, b, x1); });
  if (poly.empty()) return 0.0;
  poly = clip(poly, [&](Vec2 p) { return p.y >= y0; },
              [&](Vec2 a, Vec2 b) { return lerp_y(a, b, y0); });
  if (poly.empty()) return 0.0;
  poly = clip(poly, [&](Vec2 p) { return p.y <= y1; },
              [&](Vec2 a, Vec2 b) { return lerp_y(a, b, y1); });
  if (poly.size() < 3) return 0.0;
  return std::abs(signed_area(poly));
}

}  // namespace lpr
