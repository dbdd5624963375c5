#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lpr/flow.hpp"
#include "lpr/geometry.hpp"
#include "lpr/raster.hpp"

namespace lpr {

struct KalmanConfig {
  double q_pos = 1e-3;       // position process noise density
  double q_vel = 1e-2;       // velocity process noise density
  double r = 0.05;           // range measurement variance, m^2
  int max_coast = 30;        // consecutive unmeasured frames before drop
  bool use_gate = false;     // reject implausible measurements
  double gate_sigma = 3.0;   // gate width in innovation sigmas
};

// Constant-velocity range tracker state. Covariance is stored as the three
// unique entries of the symmetric 2x2 matrix.
struct TrackState {
  double distance = 0.0;
  double velocity = 0.0;
  double p00 = 0.0;
  double p01 = 0.0;
  double p11 = 0.0;
  bool active = false;
  int coast = 0;
};

inline TrackState kf_init(double distance, const KalmanConfig& cfg = {}) {
  if (distance <= 0.0)
    throw std::invalid_argument("kf_init: distance must be > 0");
  TrackState s;
  s.distance = distance;
  s.velocity = 0.0;
  s.p00 = cfg.r;
  s.p01 = 0.0;
  s.p11 = 1.0;
  s.active = true;
  s.coast = 0;
  return s;
}

// Time propagation under the constant-velocity model. Counts toward the
// coast limit; a subsequent accepted measurement resets the count.
inline void kf_predict(TrackState& s, double dt, const KalmanConfig& cfg = {}) {
  if (!s.active) return;
  if (dt <= 0.0) throw std::invalid_argument("kf_predict: dt must be > 0");
  s.distance += s.velocity * dt;
  const double p00 = s.p00 + 2.0 * dt * s.p01 + dt * dt * s.p11;
  const double p01 = s.p01 + dt * s.p11;
  s.p00 = p00 + cfg.q_pos * dt;
  s.p01 = p01;
  s.p11 += cfg.q_vel * dt;
  ++s.coast;
  if (s.coast >= cfg.max_coast) s.active = false;
}

// Measurement update in Joseph form (keeps the covariance positive
// semi-definite), followed by explicit symmetrization. Returns false when
// the gate is enabled and rejects the measurement; the state is untouched
// in that case.
inline bool kf_update(TrackState& s, double z, const KalmanConfig& cfg = {}) {
  if (!s.active) return false;
  if (z <= 0.0) throw std::invalid_argument("kf_update: measurement must be > 0");
  const double innovation = z - s.distance;
  const double innovation_var = s.p00 + cfg.r;
  if (cfg.use_gate &&
      innovation * innovation >
          cfg.gate_sigma * cfg.gate_sigma * innovation_var)
    return false;

  const double k0 = s.p00 / innovation_var;
  const double k1 = s.p01 / innovation_var;
  s.distance += k0 * innovation;
  s.velocity += k1 * innovation;

  const double a00 = (1.0 - k0) * s.p00;
  const double a01 = (1.0 - k0) * s.p01;
  const double a10 = -k1 * s.p00 + s.p01;
  const double a11 = -k1 * s.p01 + s.p11;
  double p00 = a00 * (1.0 - k0) + k0 * k0 * cfg.r;
  double p01 = -a00 * k1 + a01 + k0 * k1 * cfg.r;
  double p10 = a10 * (1.0 - k0) + k0 * k1 * cfg.r;
  double p11 = -a10 * k1 + a11 + k1 * k1 * cfg.r;
  s.p00 = p00;
  s.p01 = 0.5 * (p01 + p10);
  s.p11 = p11;
  s.coast = 0;
  return true;
}

struct VelocityReport {
  double velocity_mps = 0.0;  // range rate; negative means closing
  double ttc_s = std::numeric_limits<double>::infinity();
  bool ttc_valid = false;     // only meaningful while closing
};

inline VelocityReport velocity_and_ttc(const TrackState& s) {
  VelocityReport r;
  r.velocity_mps = s.velocity;
  if (s.velocity < 0.0) {
    r.ttc_s = -s.distance / s.velocity;
    r.ttc_valid = true;
  }
  return r;
}

// Carries a plate quad from one frame to the next with sparse optical
// flow. A 5x5 grid of interior points seeds the tracker; if fewer than six
// survive, tracking is abandoned. Survivor displacements are summarized by
// their per-axis medians and applied to the corners as a rigid shift.
inline std::optional<std::array<Vec2, 4>> track_bbox(
    const Raster& prev_frame, const Raster& next_frame,
    const std::array<Vec2, 4>& quad, const FlowConfig& cfg = {}) {
  std::vector<Vec2> seeds;
  seeds.reserve(25);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) {
      const double u = (i + 1) / 6.0;
      const double v = (j + 1) / 6.0;
      const Vec2 top{quad[0].x + u * (quad[1].x - quad[0].x),
                     quad[0].y + u * (quad[1].y - quad[0].y)};
      const Vec2 bottom{quad[3].x + u * (quad[2].x - quad[3].x),
                        quad[3].y + u * (quad[2].y - quad[3].y)};
      seeds.push_back(Vec2{top.x + v * (bottom.x - top.x),
                           top.y + v * (bottom.y - top.y)});
    }

  const FlowResult flow = lk_flow(prev_frame, next_frame, seeds, cfg);
  std::vector<double> dx, dy;
  for (std::size_t k = 0; k < seeds.size(); ++k)
    if (flow.status[k]) {
      dx.push_back(flow.points[k].x - seeds[k].x);
      dy.push_back(flow.points[k].y - seeds[k].y);
    }
  if (dx.size() < 6) return std::nullopt;

  auto median = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  const double mdx = median(dx);
  const double mdy = median(dy);
  std::array<Vec2, 4> moved = quad;
  for (Vec2& p : moved) {
    p.x += mdx;
    p.y += mdy;
  }
  return moved;
}

}  // namespace lpr
