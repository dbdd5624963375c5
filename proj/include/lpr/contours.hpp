#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "lpr/geometry.hpp"
#include "lpr/raster.hpp"

namespace lpr {

// Outer boundary of one 8-connected foreground component, traced clockwise
// (image convention, y down). area counts the component's pixels, not the
// polygon enclosed by the boundary.
struct Contour {
  std::vector<Pt> points;
  std::int64_t area = 0;
  Rect bbox;
};

namespace detail {

class DisjointSet {
 public:
  DisjointSet() { parent_.push_back(0); }
  std::uint32_t add() {
    const std::uint32_t l = static_cast<std::uint32_t>(parent_.size());
    parent_.push_back(l);
    return l;
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::uint32_t> parent_;
};

// Moore neighborhood in clockwise order (y down), starting west.
inline constexpr int kMooreDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
inline constexpr int kMooreDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

// Clockwise Moore-neighbor trace of the outer boundary, started from the
// component's topmost-leftmost pixel (whose west neighbor is guaranteed
// background). Terminates by Jacob's criterion: the walk is about to leave
// the start pixel along the same direction it originally did. The walk may
// legitimately revisit pixels on one-pixel-wide limbs; only the final
// closing duplicate of the start is dropped.
inline std::vector<Pt> trace_boundary(const Raster& bin, Pt start) {
  auto fg = [&](int x, int y) {
    return bin.in_bounds(x, y) && bin.at(x, y) != 0;
  };
  // direction index of a unit step (dx, dy): dir_of[dy + 1][dx + 1]
  static constexpr int dir_of[3][3] = {{1, 2, 3}, {0, -1, 4}, {7, 6, 5}};

  std::vector<Pt> path{start};
  Pt cur = start;
  int bg_dir = 0;  // west of the start pixel is background by construction
  int first_dir = -1;
  const std::int64_t guard =
      8 * static_cast<std::int64_t>(bin.width) * bin.height + 16;

  for (std::int64_t step = 0; step < guard; ++step) {
    int move = -1;
    for (int i = 1; i <= 8; ++i) {
      int d = (bg_dir + i) % 8;
      if (fg(cur.x + kMooreDx[d], cur.y + kMooreDy[d])) {
        move = d;
        break;
      }
    }
    if (move < 0) break;  // isolated pixel
    if (first_dir < 0)
      first_dir = move;
    else if (cur == start && move == first_dir)
      break;  // boundary closed

    // background scanned just before the hit, re-expressed from the new pixel
    const int last_bg = (move + 7) % 8;
    const Pt bg_px{cur.x + kMooreDx[last_bg], cur.y + kMooreDy[last_bg]};
    cur = {cur.x + kMooreDx[move], cur.y + kMooreDy[move]};
    path.push_back(cur);
    bg_dir = dir_of[bg_px.y - cur.y + 1][bg_px.x - cur.x + 1];
  }
  if (path.size() > 1 && path.back() == path.front()) path.pop_back();
  return path;
}

}  // namespace detail

// Area, bounding box and trace anchor of one 8-connected foreground
// component. The anchor is the topmost-leftmost pixel, where a clockwise
// Moore trace may begin.
struct ComponentStats {
  Pt start;
  std::int64_t area = 0;
  Rect bbox;
};

// Connected-component statistics without boundary tracing, ordered by
// first-encountered pixel in raster-scan order. Labeling works on
// horizontal foreground runs: each run unites with the 8-connected runs of
// the previous row (a two-pointer sweep, since both run lists are sorted
// by column), so union-find traffic scales with the number of runs rather
// than pixels.
inline std::vector<ComponentStats> find_components(const Raster& bin) {
  std::vector<ComponentStats> out;
  if (bin.empty()) return out;
  const int w = bin.width, h = bin.height;

  struct Run {
    int x0, x1, y;
    std::uint32_t label;
  };
  std::vector<Run> runs;
  detail::DisjointSet ds;

  std::size_t prev_begin = 0, prev_end = 0;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = &bin.data[static_cast<std::size_t>(y) * w];
    const std::size_t row_begin = runs.size();
    std::size_t p = prev_begin;
    int x = 0;
    while (x < w) {
      while (x + 8 <= w) {  // hop over all-background words
        std::uint64_t chunk;
        std::memcpy(&chunk, row + x, 8);
        if (chunk != 0) break;
        x += 8;
      }
      while (x < w && row[x] == 0) ++x;
      if (x >= w) break;
      const int x0 = x;
      while (x + 8 <= w) {  // hop over saturated foreground words
        std::uint64_t chunk;
        std::memcpy(&chunk, row + x, 8);
        if (chunk != ~std::uint64_t{0}) break;
        x += 8;
      }
      while (x < w && row[x] != 0) ++x;
      const int x1 = x - 1;
      // previous-row runs ending left of x0 - 1 are done for this row
      while (p < prev_end && runs[p].x1 < x0 - 1) ++p;
      std::uint32_t l = 0;
      for (std::size_t q = p; q < prev_end && runs[q].x0 <= x1 + 1; ++q) {
        if (l == 0)
          l = runs[q].label;
        else
          ds.unite(l, runs[q].label);
      }
      if (l == 0) l = ds.add();
      runs.push_back({x0, x1, y, l});
    }
    prev_begin = row_begin;
    prev_end = runs.size();
  }

  // resolve roots, gather per-component stats in scan order
  std::vector<std::uint32_t> compact;
  for (const Run& r : runs) {
    const std::uint32_t root = ds.find(r.label);
    if (root >= compact.size()) compact.resize(root + 1, 0);
    if (compact[root] == 0) {
      compact[root] = static_cast<std::uint32_t>(out.size() + 1);
      out.push_back({{r.x0, r.y}, 0, {r.x0, r.y, r.x1 - r.x0 + 1, 1}});
    }
    ComponentStats& c = out[compact[root] - 1];
    c.area += r.x1 - r.x0 + 1;
    Rect& b = c.bbox;
    if (r.x0 < b.x) {
      b.w += b.x - r.x0;
      b.x = r.x0;
    }
    if (r.x1 >= b.right()) b.w = r.x1 - b.x + 1;
    if (r.y >= b.bottom()) b.h = r.y - b.y + 1;
  }
  return out;
}

// External contours: one per 8-connected foreground component (nonzero
// pixels), each with its outer boundary traced clockwise. Same order as
// find_components.
inline std::vector<Contour> find_contours(const Raster& bin) {
  std::vector<Contour> out;
  for (const ComponentStats& s : find_components(bin)) {
    Contour c;
    c.area = s.area;
    c.bbox = s.bbox;
    c.points = detail::trace_boundary(bin, s.start);
    out.push_back(std::move(c));
  }
  return out;
}

// Minimum-area oriented rectangle over a contour's boundary points.
inline RotatedRect fit_rotated_rect(const Contour& c) {
  std::vector<Vec2> pts;
  pts.reserve(c.points.size());
  for (const Pt& p : c.points)
    pts.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
  return min_area_rect(pts);
}

}  // namespace lpr
