#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lpr/detection.hpp"
#include "lpr/flow.hpp"
#include "lpr/fusion.hpp"
#include "lpr/pose.hpp"
#include "lpr/ranging.hpp"
#include "lpr/raster.hpp"
#include "lpr/segmentation.hpp"
#include "lpr/temporal.hpp"

namespace lpr {

struct PipelineConfig {
  CameraModel camera;
  DetectionConfig detection;
  PoseConfig pose;
  KalmanConfig kalman;
  FlowConfig flow;
  DetectionMode initial_mode = DetectionMode::strict;
  bool multi_feature = false;
  bool use_pose = false;
  bool use_depth = false;
  bool emit_timing = false;       // include per-frame wall time in reports
  double feature_sigma_px = 1.0;  // pixel sigma of auxiliary features
};

struct EstimatePart {
  std::string source;
  double distance_m = 0.0;
  double sigma_m = 0.0;
};

// Everything measured on one frame. Serializes to a single JSON object;
// absent measurement groups are omitted rather than nulled. Wall time is
// only serialized on request so that identical inputs produce identical
// bytes.
struct FrameReport {
  int frame = 0;
  double timestamp_s = 0.0;
  std::string mode = "strict";  // detection mode used on this frame
  bool detected = false;
  bool flow_tracked = false;

  bool has_plate = false;
  std::array<Vec2, 4> corners{};
  int n_chars = 0;
  double char_height_px = 0.0;

  std::vector<EstimatePart> estimates;
  bool has_distance = false;
  double distance_m = 0.0;
  double distance_sigma_m = 0.0;

  bool pose_attempted = false;
  bool pose_valid = false;
  double pitch_rad = 0.0;
  double roll_rad = 0.0;

  bool has_track = false;
  bool track_active = false;
  double track_distance_m = 0.0;
  double track_velocity_mps = 0.0;
  bool ttc_valid = false;
  double ttc_s = 0.0;
  int coast = 0;

  double time_ms = 0.0;
  bool include_timing = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["frame"] = frame;
    j["timestamp_s"] = timestamp_s;
    j["mode"] = mode;
    j["detected"] = detected;
    j["flow_tracked"] = flow_tracked;
    if (has_plate) {
      nlohmann::json corners_j = nlohmann::json::array();
      for (const Vec2& c : corners)
        corners_j.push_back(nlohmann::json::array({c.x, c.y}));
      j["plate"] = {{"corners", corners_j},
                    {"n_chars", n_chars},
                    {"char_height_px", char_height_px}};
    }
    if (!estimates.empty()) {
      nlohmann::json parts = nlohmann::json::array();
      for (const EstimatePart& p : estimates)
        parts.push_back({{"source", p.source},
                         {"distance_m", p.distance_m},
                         {"sigma_m", p.sigma_m}});
      j["estimates"] = std::move(parts);
    }
    if (has_distance) {
      j["distance_m"] = distance_m;
      j["distance_sigma_m"] = distance_sigma_m;
    }
    if (pose_attempted) {
      j["pose"] = {{"valid", pose_valid},
                   {"pitch_rad", pitch_rad},
                   {"roll_rad", roll_rad}};
    }
    if (has_track) {
      nlohmann::json t = {{"active", track_active},
                          {"distance_m", track_distance_m},
                          {"velocity_mps", track_velocity_mps},
                          {"coast", coast}};
      if (ttc_valid) t["ttc_s"] = ttc_s;
      j["track"] = std::move(t);
    }
    if (include_timing) j["time_ms"] = time_ms;
    return j;
  }

  static FrameReport from_json(const nlohmann::json& j) {
    FrameReport r;
    r.frame = j.at("frame").get<int>();
    r.timestamp_s = j.at("timestamp_s").get<double>();
    r.mode = j.at("mode").get<std::string>();
    r.detected = j.at("detected").get<bool>();
    r.flow_tracked = j.at("flow_tracked").get<bool>();
    if (j.contains("plate")) {
      const nlohmann::json& p = j.at("plate");
      r.has_plate = true;
      const nlohmann::json& cs = p.at("corners");
      for (int i = 0; i < 4; ++i) {
        r.corners[i].x = cs.at(i).at(0).get<double>();
        r.corners[i].y = cs.at(i).at(1).get<double>();
      }
      r.n_chars = p.at("n_chars").get<int>();
      r.char_height_px = p.at("char_height_px").get<double>();
    }
    if (j.contains("estimates")) {
      for (const nlohmann::json& e : j.at("estimates")) {
        EstimatePart p;
        p.source = e.at("source").get<std::string>();
        p.distance_m = e.at("distance_m").get<double>();
        p.sigma_m = e.at("sigma_m").get<double>();
        r.estimates.push_back(std::move(p));
      }
    }
    if (j.contains("distance_m")) {
      r.has_distance = true;
      r.distance_m = j.at("distance_m").get<double>();
      r.distance_sigma_m = j.at("distance_sigma_m").get<double>();
    }
    if (j.contains("pose")) {
      r.pose_attempted = true;
      r.pose_valid = j.at("pose").at("valid").get<bool>();
      r.pitch_rad = j.at("pose").at("pitch_rad").get<double>();
      r.roll_rad = j.at("pose").at("roll_rad").get<double>();
    }
    if (j.contains("track")) {
      const nlohmann::json& t = j.at("track");
      r.has_track = true;
      r.track_active = t.at("active").get<bool>();
      r.track_distance_m = t.at("distance_m").get<double>();
      r.track_velocity_mps = t.at("velocity_mps").get<double>();
      r.coast = t.at("coast").get<int>();
      if (t.contains("ttc_s")) {
        r.ttc_valid = true;
        r.ttc_s = t.at("ttc_s").get<double>();
      }
    }
    if (j.contains("time_ms")) {
      r.include_timing = true;
      r.time_ms = j.at("time_ms").get<double>();
    }
    return r;
  }
};

// Aggregate statistics over a run, optionally against ground truth.
struct RunMetrics {
  int frames = 0;
  int detections = 0;
  int measurements = 0;
  double abs_err_sum = 0.0;
  double sq_err_sum = 0.0;
  int err_count = 0;
  double time_sum_ms = 0.0;

  void add(const FrameReport& r, const double* truth_distance_m = nullptr) {
    ++frames;
    detections += r.detected;
    measurements += r.has_distance;
    time_sum_ms += r.time_ms;
    if (truth_distance_m && r.has_distance) {
      const double e = r.distance_m - *truth_distance_m;
      abs_err_sum += std::abs(e);
      sq_err_sum += e * e;
      ++err_count;
    }
  }

  double detection_rate() const {
    return frames > 0 ? static_cast<double>(detections) / frames : 0.0;
  }
  double mae_m() const { return err_count > 0 ? abs_err_sum / err_count : 0.0; }
  double rmse_m() const {
    return err_count > 0 ? std::sqrt(sq_err_sum / err_count) : 0.0;
  }
  double mean_time_ms() const {
    return frames > 0 ? time_sum_ms / frames : 0.0;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"frames", frames},
                        {"detections", detections},
                        {"measurements", measurements},
                        {"detection_rate", detection_rate()}};
    if (err_count > 0) {
      j["mae_m"] = mae_m();
      j["rmse_m"] = rmse_m();
    }
    return j;
  }
};

// Stateful frame-by-frame processor: detection with mode hysteresis, flow
// carry-over across detection gaps, geometric ranging (optionally
// pose-normalized and fused with an externally supplied depth map), and a
// constant-velocity tracker over the fused distance.
class FramePipeline {
 public:
  explicit FramePipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    mode_.mode = cfg_.initial_mode;
  }

  const PipelineConfig& config() const { return cfg_; }
  const TrackState& track() const { return track_; }
  DetectionMode mode() const { return mode_.mode; }

  FrameReport process(const Raster& frame, double timestamp,
                      const DepthMap* depth = nullptr) {
    const auto t_start = std::chrono::steady_clock::now();
    if (prev_timestamp_ && timestamp <= *prev_timestamp_)
      throw std::invalid_argument("process: timestamps must increase");

    FrameReport r;
    r.frame = frame_index_++;
    r.timestamp_s = timestamp;
    r.mode = to_string(mode_.mode);
    r.include_timing = cfg_.emit_timing;

    std::optional<Detection> det =
        detect_plate(frame, cfg_.detection, mode_.mode);
    std::optional<std::array<Vec2, 4>> quad;
    Raster rectified;
    if (det) {
      quad = det->quad.corners;
      rectified = std::move(det->rectified);
      r.detected = true;
    } else if (prev_frame_ && prev_quad_) {
      std::optional<std::array<Vec2, 4>> moved =
          track_bbox(*prev_frame_, frame, *prev_quad_, cfg_.flow);
      if (moved) {
        Raster warped = rectify_quad(frame, *moved);
        if (!warped.empty()) {
          quad = *moved;
          rectified = std::move(warped);
          r.flow_tracked = true;
        }
      }
    }
    mode_.step(r.detected, cfg_.detection);

    std::optional<Estimate> fused;
    if (quad && !rectified.empty()) {
      std::optional<SegmentationResult> seg =
          segment_characters(rectified, cfg_.detection.segmentation);
      if (seg) {
        // Segmentation measures in rectified-plate pixels; ranging needs
        // source-sensor pixels. Corner-to-corner spans map the rectified
        // raster (w-1, h-1) back onto the quad's mean side lengths.
        const std::array<Vec2, 4>& q = *quad;
        const double w_px = 0.5 * (norm(q[1] - q[0]) + norm(q[2] - q[3]));
        const double h_px = 0.5 * (norm(q[3] - q[0]) + norm(q[2] - q[1]));
        if (rectified.width > 1 && rectified.height > 1)
          *seg = rescale_segmentation(*seg, w_px / (rectified.width - 1),
                                      h_px / (rectified.height - 1));
        if (cfg_.use_pose) {
          const PoseEstimate pose = estimate_pose(frame, cfg_.camera, cfg_.pose);
          r.pose_attempted = true;
          r.pose_valid = pose.valid;
          r.pitch_rad = pose.pitch_rad;
          r.roll_rad = pose.roll_rad;
          normalize_heights(*seg, pose);
        }
        const RangeResult rr = range_plate(*seg, cfg_.camera,
                                           cfg_.multi_feature,
                                           cfg_.feature_sigma_px);
        r.has_plate = true;
        r.corners = *quad;
        r.n_chars = seg->n;
        r.char_height_px = seg->avg_height;
        for (const Estimate& p : rr.parts)
          r.estimates.push_back(
              {to_string(p.source), p.distance_m, std::sqrt(p.variance_m2)});
        fused = rr.fused;
      }
    }

    if (quad) last_quad_ = quad;
    // The depth map keeps contributing through detection dropouts by
    // sampling the last place the plate was seen.
    if (cfg_.use_depth && depth && last_quad_) {
      std::optional<double> rel;
      try {
        rel = plate_relative_depth(*depth, *last_quad_);
      } catch (const std::invalid_argument&) {
        rel = std::nullopt;  // plate region fell outside the map
      }
      if (rel && *rel > 0.0) {
        if (fused) aligner_.update(fused->distance_m, *rel);
        if (aligner_.ready()) {
          const Estimate de = depth_estimate(*rel, aligner_);
          r.estimates.push_back({to_string(de.source), de.distance_m,
                                 std::sqrt(de.variance_m2)});
          std::vector<Estimate> all;
          if (fused) all.push_back(*fused);
          all.push_back(de);
          fused = fuse_estimates(all);
        }
      }
    }

    if (fused) {
      r.has_distance = true;
      r.distance_m = fused->distance_m;
      r.distance_sigma_m = std::sqrt(fused->variance_m2);
    }

    if (track_.active && prev_timestamp_)
      kf_predict(track_, timestamp - *prev_timestamp_, cfg_.kalman);
    if (fused && fused->distance_m > 0.0) {
      if (track_.active)
        kf_update(track_, fused->distance_m, cfg_.kalman);
      else
        track_ = kf_init(fused->distance_m, cfg_.kalman);
      ever_tracked_ = true;
    }
    if (ever_tracked_) {
      r.has_track = true;
      r.track_active = track_.active;
      r.track_distance_m = track_.distance;
      r.track_velocity_mps = track_.velocity;
      r.coast = track_.coast;
      const VelocityReport vr = velocity_and_ttc(track_);
      r.ttc_valid = track_.active && vr.ttc_valid;
      if (r.ttc_valid) r.ttc_s = vr.ttc_s;
    }

    prev_frame_ = frame;
    prev_quad_ = quad;
    prev_timestamp_ = timestamp;

    const auto t_end = std::chrono::steady_clock::now();
    r.time_ms =
        std::chrono::duration<double, std::milli>(t_end - t_start).count();
    return r;
  }

 private:
  // Re-warps a flow-carried quad with the same geometry the detector uses.
  Raster rectify_quad(const Raster& frame,
                      const std::array<Vec2, 4>& q) const {
    const double w_px = 0.5 * (norm(q[1] - q[0]) + norm(q[2] - q[3]));
    const double h_px = 0.5 * (norm(q[3] - q[0]) + norm(q[2] - q[1]));
    if (w_px < 1.0 || h_px < 1.0) return Raster();
    const double aspect = w_px / h_px;
    const int out_w = cfg_.detection.warp_width;
    const int out_h =
        std::max(1, static_cast<int>(std::lround(out_w / aspect)));
    const std::array<Vec2, 4> dst = {Vec2{0.0, 0.0}, Vec2{out_w - 1.0, 0.0},
                                     Vec2{out_w - 1.0, out_h - 1.0},
                                     Vec2{0.0, out_h - 1.0}};
    try {
      return warp_perspective(frame, solve_homography(q, dst), out_w, out_h);
    } catch (const std::invalid_argument&) {
      return Raster();
    }
  }

  // Removes the pose-induced vertical foreshortening from measured
  // character heights (all scale by the same factor, so the spread scales
  // with them). Horizontal features are left untouched.
  static void normalize_heights(SegmentationResult& seg,
                                const PoseEstimate& pose) {
    if (!pose.valid || seg.avg_height <= 0.0) return;
    const HeightCorrection hc = correct_height(seg.avg_height, pose,
                                               -pose.pitch_rad,
                                               -pose.roll_rad);
    if (!hc.applied) return;
    const double factor = hc.value / seg.avg_height;
    seg.avg_height = hc.value;
    seg.height_std *= factor;
    for (double& h : seg.heights) h *= factor;
    for (CharBox& b : seg.boxes) b.h *= factor;
  }

  PipelineConfig cfg_;
  ModeController mode_;
  TrackState track_;
  ScaleAligner aligner_;
  std::optional<Raster> prev_frame_;
  std::optional<std::array<Vec2, 4>> prev_quad_;
  std::optional<std::array<Vec2, 4>> last_quad_;  // survives dropouts
  std::optional<double> prev_timestamp_;
  bool ever_tracked_ = false;
  int frame_index_ = 0;
};

}  // namespace lpr
