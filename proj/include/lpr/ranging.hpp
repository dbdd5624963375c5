#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpr {

// Intrinsics plus the physical typography of the jurisdiction's plates.
// Dimensions are meters; only char_height_m and plate_height_m are required
// for single-feature ranging, the rest enable the auxiliary features.
struct CameraModel {
  double f_px = 0.0;
  double u0 = 0.0;
  double v0 = 0.0;
  double char_height_m = 0.0;
  double plate_height_m = 0.0;
  double plate_width_m = 0.0;
  double stroke_width_m = 0.0;
  double char_spacing_m = 0.0;
  double border_thickness_m = 0.0;
};

// One ranging measurement with its variance and provenance.
enum class EstimateSource {
  char_height,
  stroke_width,
  char_spacing,
  border_thickness,
  plate_width,
  depth_map,
  fused
};

inline const char* to_string(EstimateSource s) {
  switch (s) {
    case EstimateSource::char_height: return "char_height";
    case EstimateSource::stroke_width: return "stroke_width";
    case EstimateSource::char_spacing: return "char_spacing";
    case EstimateSource::border_thickness: return "border_thickness";
    case EstimateSource::plate_width: return "plate_width";
    case EstimateSource::depth_map: return "depth_map";
    case EstimateSource::fused: return "fused";
  }
  return "unknown";
}

struct Estimate {
  double distance_m = 0.0;
  double variance_m2 = 0.0;
  EstimateSource source = EstimateSource::char_height;
};

struct CalibrationSample {
  double pixel_height = 0.0;  // plate height on the sensor, pixels
  double distance_m = 0.0;    // measured ground-truth distance
  // Top/bottom plate edge widths let calibration warn about tilted shots;
  // leave zero when unknown.
  double top_width_px = 0.0;
  double bottom_width_px = 0.0;
};

struct CalibrationResult {
  double f_px = 0.0;
  std::vector<std::string> warnings;
};

// Focal length from known-distance shots: f = P * D / H for each sample,
// averaged. Warns when the result is outside the plausible [300, 5000] px
// band or when a sample's plate edges differ by more than 15% (tilted
// calibration target).
inline CalibrationResult calibrate(const std::vector<CalibrationSample>& samples,
                                   double plate_height_m) {
  if (samples.empty())
    throw std::invalid_argument("calibrate: no samples");
  if (plate_height_m <= 0.0)
    throw std::invalid_argument("calibrate: plate height must be positive");

  CalibrationResult r;
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const CalibrationSample& s = samples[i];
    if (s.pixel_height <= 0.0 || s.distance_m <= 0.0)
      throw std::invalid_argument("calibrate: non-positive sample");
    sum += s.pixel_height * s.distance_m / plate_height_m;
    const double top = s.top_width_px, bot = s.bottom_width_px;
    if (top > 0.0 && bot > 0.0) {
      const double skew = std::abs(top - bot) / std::max(top, bot);
      if (skew > 0.15)
        r.warnings.push_back("sample " + std::to_string(i) +
                             ": plate edges differ by " +
                             std::to_string(skew * 100.0) +
                             "% (tilted target?)");
    }
  }
  r.f_px = sum / static_cast<double>(samples.size());
  if (r.f_px < 300.0)
    r.warnings.push_back("focal length " + std::to_string(r.f_px) +
                         " px is implausibly short");
  else if (r.f_px > 5000.0)
    r.warnings.push_back("focal length " + std::to_string(r.f_px) +
                         " px is implausibly long");
  return r;
}

// Pinhole inversion: D = f * physical_size / pixel_size.
inline double distance_from_feature(double f_px, double physical_m,
                                    double pixel_size) {
  if (f_px <= 0.0 || physical_m <= 0.0 || pixel_size <= 0.0)
    throw std::invalid_argument("distance_from_feature: non-positive input");
  return f_px * physical_m / pixel_size;
}

// First-order error propagation of the pixel measurement through the
// pinhole model: sigma_D = (D / h) * sigma_h.
inline double propagate_uncertainty(double distance_m, double pixel_size,
                                    double pixel_sigma) {
  if (distance_m <= 0.0 || pixel_size <= 0.0)
    throw std::invalid_argument("propagate_uncertainty: non-positive input");
  if (pixel_sigma < 0.0)
    throw std::invalid_argument("propagate_uncertainty: negative sigma");
  return distance_m / pixel_size * pixel_sigma;
}

// Inverse-variance weighting. Variances are floored at 1e-12 so an exact
// measurement cannot zero out the rest.
inline Estimate fuse_estimates(const std::vector<Estimate>& estimates) {
  if (estimates.empty())
    throw std::invalid_argument("fuse_estimates: empty input");
  double wsum = 0.0, dsum = 0.0;
  for (const Estimate& e : estimates) {
    const double var = std::max(e.variance_m2, 1e-12);
    const double w = 1.0 / var;
    wsum += w;
    dsum += w * e.distance_m;
  }
  return Estimate{dsum / wsum, 1.0 / wsum, EstimateSource::fused};
}

}  // namespace lpr

#include "lpr/segmentation.hpp"

namespace lpr {

struct RangeResult {
  std::vector<Estimate> parts;  // per-feature estimates that entered the fuse
  Estimate fused;
};

// Distance from a segmented plate. The character-height estimate always
// participates (sigma_h = height std / sqrt(n)); with multi_feature set,
// every auxiliary feature that is both configured (physical size > 0) and
// measured (pixel size > 0) joins at a fixed pixel sigma, and the results
// are fused by inverse variance. With no usable auxiliary features the
// result equals the character-height estimate alone.
inline RangeResult range_plate(const SegmentationResult& seg,
                               const CameraModel& cam, bool multi_feature,
                               double feature_sigma_px = 1.0) {
  if (cam.f_px <= 0.0 || cam.char_height_m <= 0.0)
    throw std::invalid_argument("range_plate: camera not configured");
  if (seg.avg_height <= 0.0)
    throw std::invalid_argument("range_plate: non-positive height");

  RangeResult r;
  const double d_char =
      distance_from_feature(cam.f_px, cam.char_height_m, seg.avg_height);
  const double sigma_h = seg.height_std / std::sqrt(static_cast<double>(seg.n));
  const double sigma_d = propagate_uncertainty(d_char, seg.avg_height, sigma_h);
  r.parts.push_back({d_char, sigma_d * sigma_d, EstimateSource::char_height});

  if (multi_feature) {
    auto add = [&](double physical_m, double pixel_size, EstimateSource src) {
      if (physical_m <= 0.0 || pixel_size <= 0.0) return;
      const double d = distance_from_feature(cam.f_px, physical_m, pixel_size);
      const double sd = propagate_uncertainty(d, pixel_size, feature_sigma_px);
      r.parts.push_back({d, sd * sd, src});
    };
    add(cam.stroke_width_m, seg.stroke_width, EstimateSource::stroke_width);
    add(cam.char_spacing_m, seg.char_spacing, EstimateSource::char_spacing);
    add(cam.border_thickness_m, seg.border_thickness,
        EstimateSource::border_thickness);
  }

  r.fused = fuse_estimates(r.parts);
  return r;
}

}  // namespace lpr
