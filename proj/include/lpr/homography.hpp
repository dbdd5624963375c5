#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "lpr/geometry.hpp"
#include "lpr/raster.hpp"

namespace lpr {

// 3x3 projective map, stored row-major and normalized so m[8] == 1.
class Homography {
 public:
  Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

  explicit Homography(const std::array<double, 9>& m) : m_(m) {
    if (std::abs(m_[8]) < 1e-300)
      throw std::invalid_argument("Homography: unnormalizable matrix");
    for (double& v : m_) v /= m_[8];
    if (std::abs(det()) < 1e-12)
      throw std::invalid_argument("Homography: singular matrix");
  }

  const std::array<double, 9>& matrix() const { return m_; }

  double det() const {
    return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) -
           m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
           m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
  }

  Vec2 apply(Vec2 p) const {
    const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
    if (std::abs(w) < 1e-300)
      throw std::invalid_argument("Homography: point maps to infinity");
    return {(m_[0] * p.x + m_[1] * p.y + m_[2]) / w,
            (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
  }

  Homography inverse() const {
    const double d = det();
    std::array<double, 9> inv = {
        (m_[4] * m_[8] - m_[5] * m_[7]) / d, (m_[2] * m_[7] - m_[1] * m_[8]) / d,
        (m_[1] * m_[5] - m_[2] * m_[4]) / d, (m_[5] * m_[6] - m_[3] * m_[8]) / d,
        (m_[0] * m_[8] - m_[2] * m_[6]) / d, (m_[2] * m_[3] - m_[0] * m_[5]) / d,
        (m_[3] * m_[7] - m_[4] * m_[6]) / d, (m_[1] * m_[6] - m_[0] * m_[7]) / d,
        (m_[0] * m_[4] - m_[1] * m_[3]) / d};
    return Homography(inv);
  }

 private:
  std::array<double, 9> m_;
};

namespace detail {

// Gaussian elimination with partial pivoting on an n x (n+1) augmented
// system. Returns false when the pivot collapses (singular system).
template <int N>
inline bool solve_linear(std::array<std::array<double, N + 1>, N>& a,
                         std::array<double, N>& x) {
  for (int col = 0; col < N; ++col) {
    int pivot = col;
    for (int r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    std::swap(a[col], a[pivot]);
    for (int r = 0; r < N; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c <= N; ++c) a[r][c] -= f * a[col][c];
    }
  }
  for (int i = 0; i < N; ++i) x[i] = a[i][N] / a[i][i];
  return true;
}

// Similarity normalization (centroid to origin, mean distance sqrt(2)).
struct Similarity {
  double s = 1.0, tx = 0.0, ty = 0.0;
  Vec2 apply(Vec2 p) const { return {s * (p.x + tx), s * (p.y + ty)}; }
};

inline Similarity normalizer(const std::array<Vec2, 4>& pts) {
  Vec2 c{0, 0};
  for (const Vec2& p : pts) c = c + p;
  c = c * 0.25;
  double mean_d = 0.0;
  for (const Vec2& p : pts) mean_d += norm(p - c);
  mean_d /= 4.0;
  Similarity t;
  t.tx = -c.x;
  t.ty = -c.y;
  t.s = mean_d > 1e-12 ? std::sqrt(2.0) / mean_d : 1.0;
  return t;
}

inline bool any_three_collinear(const std::array<Vec2, 4>& p, double eps) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k)
        if (std::abs(cross(p[j] - p[i], p[k] - p[i])) < eps) return true;
  return false;
}

}  // namespace detail

// Exact four-point direct linear transform. Inputs are Hartley-normalized
// for conditioning; a configuration with three collinear points in either
// set is rejected.
inline Homography solve_homography(const std::array<Vec2, 4>& src,
                                   const std::array<Vec2, 4>& dst) {
  if (detail::any_three_collinear(src, 1e-9) ||
      detail::any_three_collinear(dst, 1e-9))
    throw std::invalid_argument("solve_homography: degenerate configuration");

  const detail::Similarity ts = detail::normalizer(src);
  const detail::Similarity td = detail::normalizer(dst);

  std::array<std::array<double, 9>, 8> a{};
  for (int i = 0; i < 4; ++i) {
    const Vec2 s = ts.apply(src[i]);
    const Vec2 d = td.apply(dst[i]);
    a[2 * i] = {s.x, s.y, 1, 0, 0, 0, -d.x * s.x, -d.x * s.y, d.x};
    a[2 * i + 1] = {0, 0, 0, s.x, s.y, 1, -d.y * s.x, -d.y * s.y, d.y};
  }
  std::array<double, 8> hv{};
  if (!detail::solve_linear<8>(a, hv))
    throw std::invalid_argument("solve_homography: singular system");

  // Hn maps normalized src to normalized dst; undo the similarities:
  // H = Td^-1 * Hn * Ts.
  const std::array<double, 9> hn = {hv[0], hv[1], hv[2], hv[3], hv[4],
                                    hv[5], hv[6], hv[7], 1.0};
  auto mul = [](const std::array<double, 9>& a3, const std::array<double, 9>& b3) {
    std::array<double, 9> r{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) r[3 * i + j] += a3[3 * i + k] * b3[3 * k + j];
    return r;
  };
  const std::array<double, 9> mts = {ts.s, 0, ts.s * ts.tx,
                                     0, ts.s, ts.s * ts.ty,
                                     0, 0, 1};
  const std::array<double, 9> mtd_inv = {1.0 / td.s, 0, -td.tx,
                                         0, 1.0 / td.s, -td.ty,
                                         0, 0, 1};
  return Homography(mul(mtd_inv, mul(hn, mts)));
}

// Inverse-mapping perspective warp with bilinear sampling: for each output
// pixel the source location is H^-1 (x, y); samples outside the source
// raster are written as 0. H maps source coordinates to output coordinates.
inline Raster warp_perspective(const Raster& src, const Homography& h,
                               int out_w, int out_h) {
  if (src.empty()) throw std::invalid_argument("warp_perspective: empty image");
  if (out_w < 1 || out_h < 1)
    throw std::invalid_argument("warp_perspective: bad output size");
  const Homography inv = h.inverse();
  const std::array<double, 9>& m = inv.matrix();
  Raster out(out_w, out_h, 0);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) {
      const double w = m[6] * x + m[7] * y + m[8];
      if (std::abs(w) < 1e-12) continue;
      const double sx = (m[0] * x + m[1] * y + m[2]) / w;
      const double sy = (m[3] * x + m[4] * y + m[5]) / w;
      if (sx < 0.0 || sy < 0.0 || sx > src.width - 1 || sy > src.height - 1)
        continue;
      out.at(x, y) = round_u8(sample_bilinear(src, sx, sy));
    }
  return out;
}

}  // namespace lpr
