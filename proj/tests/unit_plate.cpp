// Unit tests for plate detection, character segmentation, pinhole ranging,
// and road-pose estimation, largely driven by the synthetic renderer whose
// truth output provides exact projected geometry.

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lpr/detection.hpp"
#include "lpr/pose.hpp"
#include "lpr/ranging.hpp"
#include "lpr/segmentation.hpp"
#include "lpr/synth.hpp"
#include "oracles.hpp"

using lpr::CameraModel;
using lpr::Raster;
using lpr::Vec2;

namespace {

constexpr double kPi = std::numbers::pi;

lpr::SceneSpec plate_scene(double distance_m) {
  lpr::SceneSpec spec;
  spec.distance_m = distance_m;
  spec.vertical_m = 0.0;  // keep close-range plates inside the frame
  return spec;
}

// Crops the axis-aligned full-coverage pixel block of a fronto-parallel
// plate using the exact projected corners (pixel footprints are centered
// on integer coordinates).
Raster crop_to_plate(const lpr::RenderedScene& scene) {
  const auto& c = scene.truth.plate_corners;
  const int x0 = static_cast<int>(std::ceil(std::min(c[0].x, c[3].x) + 0.5));
  const int x1 = static_cast<int>(std::floor(std::max(c[1].x, c[2].x) - 0.5));
  const int y0 = static_cast<int>(std::ceil(std::min(c[0].y, c[1].y) + 0.5));
  const int y1 = static_cast<int>(std::floor(std::max(c[2].y, c[3].y) - 0.5));
  Raster out(x1 - x0 + 1, y1 - y0 + 1);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) out.at(x - x0, y - y0) = scene.image.at(x, y);
  return out;
}

double corner_error(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    worst = std::max(worst, std::hypot(a[i].x - b[i].x, a[i].y - b[i].y));
  return worst;
}

// Two anti-aliased strokes of slope +-slope crossing at (cx, cy), used to
// probe the vanishing-row estimate with a known intersection.
Raster crossing_strokes(int w, int h, double cx, double cy, double slope,
                        double half_thickness = 2.5) {
  Raster img(w, h, 220);
  auto paint = [&](double s) {
    for (int x = 0; x < w; ++x) {
      const double yc = cy + s * (x - cx);
      const int lo = std::max(0, static_cast<int>(std::floor(yc - half_thickness - 1.0)));
      const int hi = std::min(h - 1, static_cast<int>(std::ceil(yc + half_thickness + 1.0)));
      for (int y = lo; y <= hi; ++y) {
        const double cover =
            std::clamp(half_thickness + 0.5 - std::abs(y - yc), 0.0, 1.0);
        if (cover <= 0.0) continue;
        const double v = img.at(x, y);
        img.at(x, y) = lpr::round_u8(v + cover * (30.0 - v));
      }
    }
  };
  paint(slope);
  paint(-slope);
  return img;
}

lpr::SceneSpec lanes_scene(double pitch_rad) {
  lpr::SceneSpec spec;
  spec.draw_plate = false;
  spec.draw_lanes = true;
  spec.pitch_rad = pitch_rad;
  return spec;
}

CameraModel full_camera(double f_px) {
  CameraModel cam;
  cam.f_px = f_px;
  cam.u0 = 639.5;
  cam.v0 = 359.5;
  cam.char_height_m = 0.075;
  cam.plate_height_m = 0.152;
  cam.plate_width_m = 0.305;
  cam.stroke_width_m = 0.008;
  cam.char_spacing_m = 0.010;
  cam.border_thickness_m = 0.005;
  return cam;
}

}  // namespace

// ---------------------------------------------------------------------------
// detection

TEST(Detection, RenderedPlateIsLocatedWithinThreePixels) {
  const lpr::RenderedScene scene = lpr::render_scene(plate_scene(1.525));
  const auto det = lpr::detect_plate(scene.image);
  ASSERT_TRUE(det.has_value());
  EXPECT_LE(corner_error(det->quad.corners, scene.truth.plate_corners), 3.0);
  EXPECT_EQ(det->rectified.width, 400);
  EXPECT_GE(det->rectified.height, 20);
  EXPECT_TRUE(lpr::verify_plate_region(det->rectified));
}

TEST(Detection, BlankFrameYieldsNothing) {
  EXPECT_FALSE(lpr::detect_plate(Raster(640, 480, 200)).has_value());
  EXPECT_THROW(lpr::detect_plate(Raster()), std::invalid_argument);
}

TEST(Detection, WideAspectPassesOnlyInPermissiveMode) {
  lpr::SceneSpec spec = plate_scene(0.75);
  spec.plate_height_m = 0.305 / 4.5;  // aspect ratio 4.5
  spec.char_height_m = 0.04;
  const lpr::RenderedScene scene = lpr::render_scene(spec);
  EXPECT_FALSE(
      lpr::detect_plate(scene.image, {}, lpr::DetectionMode::strict).has_value());
  const auto det =
      lpr::detect_plate(scene.image, {}, lpr::DetectionMode::permissive);
  ASSERT_TRUE(det.has_value());
  EXPECT_LE(corner_error(det->quad.corners, scene.truth.plate_corners), 3.0);
}

TEST(Detection, VerifyRejectsUniformRegion) {
  EXPECT_FALSE(lpr::verify_plate_region(Raster(200, 100, 180)));
  EXPECT_THROW(lpr::verify_plate_region(Raster()), std::invalid_argument);
}

TEST(Detection, VerifyRejectsPureNoiseRegions) {
  std::mt19937 rng(4242);
  std::normal_distribution<double> noise(128.0, 12.0);
  int rejected = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    Raster patch(200, 100);
    for (std::uint8_t& v : patch.data) v = lpr::round_u8(noise(rng));
    rejected += !lpr::verify_plate_region(patch);
  }
  EXPECT_GE(rejected, 990);
}

TEST(Detection, ModeControllerHysteresis) {
  lpr::ModeController mc;
  for (int i = 0; i < 29; ++i) mc.step(false);
  EXPECT_EQ(mc.mode, lpr::DetectionMode::strict);
  EXPECT_EQ(mc.miss_count, 29);
  mc.step(false);
  EXPECT_EQ(mc.mode, lpr::DetectionMode::permissive);
  mc.step(true);
  EXPECT_EQ(mc.mode, lpr::DetectionMode::strict);
  EXPECT_EQ(mc.miss_count, 0);
}

TEST(Detection, ModeControllerIsDeterministic) {
  std::mt19937 rng(7);
  lpr::ModeController a, b;
  for (int i = 0; i < 200; ++i) {
    const bool hit = rng() % 5 == 0;
    a.step(hit);
    b.step(hit);
    ASSERT_EQ(a.mode, b.mode);
    ASSERT_EQ(a.miss_count, b.miss_count);
  }
}

TEST(Detection, OrderCornersIsPermutationInvariant) {
  const std::array<Vec2, 4> canonical{{{10, 10}, {100, 12}, {98, 60}, {8, 58}}};
  std::array<int, 4> idx{0, 1, 2, 3};
  std::sort(idx.begin(), idx.end());
  int checked = 0;
  do {
    const std::array<Vec2, 4> shuffled{canonical[idx[0]], canonical[idx[1]],
                                       canonical[idx[2]], canonical[idx[3]]};
    const std::array<Vec2, 4> ordered = lpr::order_corners(shuffled);
    for (int i = 0; i < 4; ++i) {
      ASSERT_DOUBLE_EQ(ordered[i].x, canonical[i].x);
      ASSERT_DOUBLE_EQ(ordered[i].y, canonical[i].y);
    }
    ++checked;
  } while (std::next_permutation(idx.begin(), idx.end()));
  EXPECT_EQ(checked, 24);
}

// ---------------------------------------------------------------------------
// segmentation

TEST(Segmentation, RenderedPlateCharactersAreMeasured) {
  const lpr::RenderedScene scene = lpr::render_scene(plate_scene(1.0));
  const Raster plate = crop_to_plate(scene);
  const auto seg = lpr::segment_characters(plate);
  ASSERT_TRUE(seg.has_value());
  EXPECT_GE(seg->n, 6);
  EXPECT_LE(seg->n, 8);
  EXPECT_DOUBLE_EQ(seg->scale_applied, 1.0);  // 152-row plate needs no upscale
  EXPECT_NEAR(seg->avg_height, scene.truth.mean_char_height_px,
              0.03 * scene.truth.mean_char_height_px);
  // boxes are reported left to right
  for (std::size_t i = 1; i < seg->boxes.size(); ++i)
    EXPECT_GT(seg->boxes[i].x, seg->boxes[i - 1].x);
}

TEST(Segmentation, UniformPlateFails) {
  EXPECT_FALSE(lpr::segment_characters(Raster(300, 150, 200)).has_value());
  EXPECT_THROW(lpr::segment_characters(Raster()), std::invalid_argument);
}

TEST(Segmentation, TypographyOfRenderedPlateMatchesSpec) {
  // At one meter and f = 1000 the stroke, spacing and border project to
  // 8, 10 and 5 pixels.
  const lpr::RenderedScene scene = lpr::render_scene(plate_scene(1.0));
  const Raster plate = crop_to_plate(scene);
  const auto seg = lpr::segment_characters(plate);
  ASSERT_TRUE(seg.has_value());
  EXPECT_NEAR(seg->stroke_width, 8.0, 1.0);
  EXPECT_NEAR(seg->char_spacing, 10.0, 1.5);
  EXPECT_NEAR(seg->border_thickness, 5.0, 1.5);
}

TEST(Segmentation, BorderlessPlateMeasuresZeroBorder) {
  lpr::SceneSpec spec = plate_scene(1.0);
  spec.border_thickness_m = 0.0;
  const lpr::RenderedScene scene = lpr::render_scene(spec);
  const auto seg = lpr::segment_characters(crop_to_plate(scene));
  ASSERT_TRUE(seg.has_value());
  EXPECT_NEAR(seg->border_thickness, 0.0, 0.5);
}

TEST(Segmentation, HeightsAreStableUnderResampling) {
  const lpr::RenderedScene scene = lpr::render_scene(plate_scene(1.0));
  const Raster plate = crop_to_plate(scene);
  const auto base = lpr::segment_characters(plate);
  const auto doubled = lpr::segment_characters(lpr::resize_bicubic(plate, 2.0));
  ASSERT_TRUE(base.has_value());
  ASSERT_TRUE(doubled.has_value());
  EXPECT_NEAR(doubled->avg_height / 2.0, base->avg_height,
              0.02 * base->avg_height);
}

TEST(Segmentation, ShortPlateIsUpscaledTransparently) {
  const lpr::RenderedScene scene = lpr::render_scene(plate_scene(4.0));
  const auto seg = lpr::segment_characters(crop_to_plate(scene));
  ASSERT_TRUE(seg.has_value());
  EXPECT_GE(seg->scale_applied, 2.0);
  // truth height 18.75 px; boxes are divided back to native pixels
  EXPECT_NEAR(seg->avg_height, scene.truth.mean_char_height_px,
              0.06 * scene.truth.mean_char_height_px);
}

TEST(Segmentation, RescaleAppliesAnisotropicFactors) {
  lpr::SegmentationResult seg;
  seg.boxes = {{10.0, 5.0, 4.0, 8.0}};
  seg.heights = {8.0};
  seg.avg_height = 8.0;
  seg.height_std = 1.0;
  seg.n = 1;
  seg.stroke_width = 2.0;
  seg.char_spacing = 3.0;
  seg.border_thickness = 4.0;
  const lpr::SegmentationResult out = lpr::rescale_segmentation(seg, 2.0, 3.0);
  EXPECT_DOUBLE_EQ(out.boxes[0].x, 20.0);
  EXPECT_DOUBLE_EQ(out.boxes[0].h, 24.0);
  EXPECT_DOUBLE_EQ(out.avg_height, 24.0);
  EXPECT_DOUBLE_EQ(out.height_std, 3.0);
  EXPECT_DOUBLE_EQ(out.stroke_width, 4.0);
  EXPECT_DOUBLE_EQ(out.char_spacing, 6.0);
  EXPECT_DOUBLE_EQ(out.border_thickness, 10.0);  // mean of the two factors
  EXPECT_THROW(lpr::rescale_segmentation(seg, 0.0, 1.0), std::invalid_argument);
}

TEST(Segmentation, DeviantHeightRejectionExample) {
  const std::vector<double> heights{100.0, 101.0, 99.0, 180.0};
  const lpr::HeightFilter f = lpr::reject_deviant_heights(heights);
  EXPECT_DOUBLE_EQ(f.median, 100.5);
  EXPECT_NEAR(f.sigma, 34.6482, 1e-3);
  ASSERT_EQ(f.kept.size(), 3u);
  EXPECT_EQ(f.kept[0], 0);
  EXPECT_EQ(f.kept[1], 1);
  EXPECT_EQ(f.kept[2], 2);
}

TEST(Segmentation, DeviantHeightRejectionProperties) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> val(5.0, 200.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    std::vector<double> heights;
    for (int i = 0; i < n; ++i) heights.push_back(val(rng));
    const lpr::HeightFilter f = lpr::reject_deviant_heights(heights);
    // two-sigma rejection can never drop the majority
    ASSERT_GE(static_cast<int>(f.kept.size()), (n + 1) / 2) << "trial " << trial;
    for (std::size_t i = 1; i < f.kept.size(); ++i)
      ASSERT_LT(f.kept[i - 1], f.kept[i]);
  }
  const lpr::HeightFilter same = lpr::reject_deviant_heights({50.0, 50.0, 50.0});
  EXPECT_EQ(same.kept.size(), 3u);
  EXPECT_THROW(lpr::reject_deviant_heights({}), std::invalid_argument);
}

TEST(Segmentation, TrimmedMeanExamplesAndErrors) {
  EXPECT_DOUBLE_EQ(lpr::trimmed_mean({10.0, 10.0, 10.0}, 0), 10.0);
  EXPECT_DOUBLE_EQ(lpr::trimmed_mean({1.0, 10.0, 10.0, 10.0, 100.0}, 2), 10.0);
  EXPECT_THROW(lpr::trimmed_mean({5.0, 7.0}, 2), std::invalid_argument);
  EXPECT_THROW(lpr::trimmed_mean({1.0, 2.0, 3.0}, 1), std::invalid_argument);
  EXPECT_THROW(lpr::trimmed_mean({1.0, 2.0, 3.0}, -2), std::invalid_argument);
}

TEST(Segmentation, TypographicFeaturesOnHandBuiltPlate) {
  // Three solid 10x20 boxes at x = 0, 20, 40 on a 60x30 canvas: stroke runs
  // of 10, inter-box gaps of 10, and no border reachable within 15% of the
  // span from three of the four edges (median 0).
  Raster bin(60, 30, 0);
  std::vector<lpr::Rect> boxes{{0, 5, 10, 20}, {20, 5, 10, 20}, {40, 5, 10, 20}};
  for (const lpr::Rect& b : boxes)
    for (int y = b.y; y < b.bottom(); ++y)
      for (int x = b.x; x < b.right(); ++x) bin.at(x, y) = 255;
  const lpr::TypographicFeatures f = lpr::measure_typographic_features(bin, boxes);
  EXPECT_DOUBLE_EQ(f.stroke_width, 10.0);
  EXPECT_DOUBLE_EQ(f.char_spacing, 10.0);
  EXPECT_DOUBLE_EQ(f.border_thickness, 0.0);
}

TEST(Segmentation, FramedPlateMeasuresBorderOnAllSides) {
  // 2px frame around a 40x24 canvas plus one inner box so the stroke and
  // spacing medians stay defined.
  Raster bin(40, 24, 0);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 40; ++x)
      if (x < 2 || x >= 38 || y < 2 || y >= 22) bin.at(x, y) = 255;
  for (int y = 8; y < 16; ++y)
    for (int x = 18; x < 22; ++x) bin.at(x, y) = 255;
  const lpr::TypographicFeatures f =
      lpr::measure_typographic_features(bin, {{18, 8, 4, 8}});
  EXPECT_DOUBLE_EQ(f.border_thickness, 2.0);
}

// ---------------------------------------------------------------------------
// ranging

TEST(Ranging, CalibrationAveragesPinholeSolutions) {
  const lpr::CalibrationResult one =
      lpr::calibrate({{100.0, 2.0, 0.0, 0.0}}, 0.152);
  EXPECT_NEAR(one.f_px, 1315.7894736842106, 1e-9);
  EXPECT_TRUE(one.warnings.empty());

  const lpr::CalibrationResult two =
      lpr::calibrate({{100.0, 2.0, 0.0, 0.0}, {250.0, 0.8, 0.0, 0.0}}, 0.152);
  EXPECT_NEAR(two.f_px, 1315.7894736842106, 1e-9);
}

TEST(Ranging, CalibrationWarnsOnImplausibleFocalLengths) {
  const lpr::CalibrationResult low =
      lpr::calibrate({{25.51, 0.5, 0.0, 0.0}}, 0.152);
  EXPECT_NEAR(low.f_px, 83.914473684210535, 1e-9);
  ASSERT_EQ(low.warnings.size(), 1u);
  EXPECT_NE(low.warnings[0].find("implausibly short"), std::string::npos);

  const lpr::CalibrationResult high =
      lpr::calibrate({{1000.0, 1.0, 0.0, 0.0}}, 0.152);
  ASSERT_EQ(high.warnings.size(), 1u);
  EXPECT_NE(high.warnings[0].find("implausibly long"), std::string::npos);
}

TEST(Ranging, CalibrationWarnsOnTiltedTarget) {
  const lpr::CalibrationResult r =
      lpr::calibrate({{100.0, 2.0, 100.0, 80.0}}, 0.152);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("tilted"), std::string::npos);
}

TEST(Ranging, CalibrationRejectsBadInput) {
  EXPECT_THROW(lpr::calibrate({}, 0.152), std::invalid_argument);
  EXPECT_THROW(lpr::calibrate({{0.0, 2.0, 0.0, 0.0}}, 0.152),
               std::invalid_argument);
  EXPECT_THROW(lpr::calibrate({{10.0, -1.0, 0.0, 0.0}}, 0.152),
               std::invalid_argument);
  EXPECT_THROW(lpr::calibrate({{10.0, 1.0, 0.0, 0.0}}, 0.0),
               std::invalid_argument);
}

TEST(Ranging, DistanceFromFeatureExamples) {
  EXPECT_NEAR(lpr::distance_from_feature(83.92, 0.07, 186.5), 0.0314981233,
              1e-9);
  EXPECT_NEAR(lpr::distance_from_feature(83.92, 0.07, 174.7), 0.0336256440,
              1e-9);
  EXPECT_DOUBLE_EQ(lpr::distance_from_feature(100.0, 0.075, 7.5), 1.0);
  EXPECT_THROW(lpr::distance_from_feature(0.0, 0.07, 100.0),
               std::invalid_argument);
  EXPECT_THROW(lpr::distance_from_feature(100.0, -0.07, 100.0),
               std::invalid_argument);
  EXPECT_THROW(lpr::distance_from_feature(100.0, 0.07, 0.0),
               std::invalid_argument);
}

TEST(Ranging, UncertaintyPropagationExamples) {
  EXPECT_DOUBLE_EQ(lpr::propagate_uncertainty(10.0, 100.0, 1.0), 0.1);
  EXPECT_DOUBLE_EQ(lpr::propagate_uncertainty(10.0, 100.0, 0.0), 0.0);
  EXPECT_NEAR(lpr::propagate_uncertainty(0.0323, 181.0, 4.2), 7.495e-4, 1e-7);
  EXPECT_THROW(lpr::propagate_uncertainty(0.0, 100.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(lpr::propagate_uncertainty(10.0, 0.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(lpr::propagate_uncertainty(10.0, 100.0, -1.0),
               std::invalid_argument);
}

TEST(Ranging, FusionExamples) {
  using lpr::Estimate;
  using lpr::EstimateSource;
  const Estimate even = lpr::fuse_estimates(
      {{10.0, 1.0, EstimateSource::char_height},
       {12.0, 1.0, EstimateSource::plate_width}});
  EXPECT_DOUBLE_EQ(even.distance_m, 11.0);
  EXPECT_DOUBLE_EQ(even.variance_m2, 0.5);
  EXPECT_EQ(even.source, EstimateSource::fused);

  const Estimate uneven = lpr::fuse_estimates(
      {{10.0, 1.0, EstimateSource::char_height},
       {14.0, 3.0, EstimateSource::plate_width}});
  EXPECT_NEAR(uneven.distance_m, 11.0, 1e-12);
  EXPECT_NEAR(uneven.variance_m2, 0.75, 1e-12);

  const Estimate single =
      lpr::fuse_estimates({{7.0, 0.04, EstimateSource::char_height}});
  EXPECT_DOUBLE_EQ(single.distance_m, 7.0);
  EXPECT_DOUBLE_EQ(single.variance_m2, 0.04);

  const Estimate floored =
      lpr::fuse_estimates({{5.0, 0.0, EstimateSource::char_height}});
  EXPECT_DOUBLE_EQ(floored.variance_m2, 1e-12);

  EXPECT_THROW(lpr::fuse_estimates({}), std::invalid_argument);
}

TEST(Ranging, FusionIsPermutationInvariantAndNeverWorseThanBest) {
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> logd(-3.0, 3.0);
  std::uniform_real_distribution<double> logv(-14.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<lpr::Estimate> est;
    for (int i = 0; i < n; ++i)
      est.push_back({std::pow(10.0, logd(rng)), std::pow(10.0, logv(rng)),
                     lpr::EstimateSource::char_height});
    const lpr::Estimate base = lpr::fuse_estimates(est);
    double min_var = 1e300;
    for (const auto& e : est) min_var = std::min(min_var, std::max(e.variance_m2, 1e-12));
    ASSERT_LE(base.variance_m2, min_var * (1.0 + 1e-12)) << "trial " << trial;

    std::shuffle(est.begin(), est.end(), rng);
    const lpr::Estimate shuffled = lpr::fuse_estimates(est);
    ASSERT_NEAR(shuffled.distance_m, base.distance_m,
                1e-12 * std::abs(base.distance_m))
        << "trial " << trial;
    ASSERT_NEAR(shuffled.variance_m2, base.variance_m2,
                1e-12 * base.variance_m2)
        << "trial " << trial;
  }
}

TEST(Ranging, PlateRangeFromCharacterHeightAlone) {
  lpr::SegmentationResult seg;
  seg.avg_height = 186.5;
  seg.height_std = 0.0;
  seg.n = 7;
  CameraModel cam;
  cam.f_px = 83.92;
  cam.char_height_m = 0.07;
  const lpr::RangeResult r = lpr::range_plate(seg, cam, false);
  ASSERT_EQ(r.parts.size(), 1u);
  EXPECT_EQ(r.parts[0].source, lpr::EstimateSource::char_height);
  EXPECT_NEAR(r.fused.distance_m, 0.0314981233, 1e-9);
  EXPECT_DOUBLE_EQ(r.fused.variance_m2, 1e-12);  // zero spread hits the floor
}

TEST(Ranging, ConsistentFeaturesAgreeOnDistance) {
  // Every feature of a plate at exactly 3 m with f = 1000.
  lpr::SegmentationResult seg;
  seg.avg_height = 25.0;
  seg.height_std = 0.5;
  seg.n = 7;
  seg.stroke_width = 8.0 / 3.0;
  seg.char_spacing = 10.0 / 3.0;
  seg.border_thickness = 5.0 / 3.0;
  const CameraModel cam = full_camera(1000.0);
  const lpr::RangeResult r = lpr::range_plate(seg, cam, true);
  ASSERT_EQ(r.parts.size(), 4u);
  for (const lpr::Estimate& p : r.parts)
    EXPECT_NEAR(p.distance_m, 3.0, 1e-12) << to_string(p.source);
  EXPECT_NEAR(r.fused.distance_m, 3.0, 1e-12);
  EXPECT_EQ(r.parts[1].source, lpr::EstimateSource::stroke_width);
  EXPECT_EQ(r.parts[2].source, lpr::EstimateSource::char_spacing);
  EXPECT_EQ(r.parts[3].source, lpr::EstimateSource::border_thickness);
}

TEST(Ranging, UnmeasuredAuxiliaryFeaturesFallBackToCharHeight) {
  lpr::SegmentationResult seg;
  seg.avg_height = 25.0;
  seg.height_std = 0.5;
  seg.n = 7;
  seg.stroke_width = 0.0;
  seg.char_spacing = 0.0;
  seg.border_thickness = 0.0;
  const CameraModel cam = full_camera(1000.0);
  const lpr::RangeResult multi = lpr::range_plate(seg, cam, true);
  const lpr::RangeResult solo = lpr::range_plate(seg, cam, false);
  ASSERT_EQ(multi.parts.size(), 1u);
  EXPECT_DOUBLE_EQ(multi.fused.distance_m, solo.fused.distance_m);
  EXPECT_DOUBLE_EQ(multi.fused.variance_m2, solo.fused.variance_m2);
}

TEST(Ranging, RangePlateValidatesInput) {
  lpr::SegmentationResult seg;
  seg.avg_height = 25.0;
  seg.n = 7;
  CameraModel cam;  // f_px = 0
  EXPECT_THROW(lpr::range_plate(seg, cam, false), std::invalid_argument);
  cam.f_px = 1000.0;
  cam.char_height_m = 0.075;
  seg.avg_height = 0.0;
  EXPECT_THROW(lpr::range_plate(seg, cam, false), std::invalid_argument);
}

TEST(Ranging, RenderedPlateRangesWithinTwoPercent) {
  const lpr::RenderedScene scene = lpr::render_scene(plate_scene(3.0));
  const auto seg = lpr::segment_characters(crop_to_plate(scene));
  ASSERT_TRUE(seg.has_value());
  const CameraModel cam = full_camera(1000.0);
  const lpr::RangeResult r = lpr::range_plate(*seg, cam, true);
  EXPECT_NEAR(r.fused.distance_m, 3.0, 0.06);
  EXPECT_GE(r.parts.size(), 2u);  // auxiliary features were measured
}

// ---------------------------------------------------------------------------
// pose

TEST(Pose, CrossingAtPrincipalRowMeansZeroPitch) {
  const Raster frame = crossing_strokes(640, 480, 319.5, 239.5, 0.25);
  CameraModel cam;
  cam.f_px = 500.0;
  cam.v0 = 239.5;
  const lpr::PoseEstimate pose = lpr::estimate_pose(frame, cam);
  ASSERT_TRUE(pose.valid);
  EXPECT_GE(pose.n_lines, 2);
  EXPECT_NEAR(pose.pitch_rad, 0.0, 0.01);
  EXPECT_NEAR(pose.roll_rad, 0.0, 0.01);
}

TEST(Pose, CrossingOneFocalLengthBelowMeansQuarterPitch) {
  const Raster frame = crossing_strokes(640, 480, 319.5, 439.5, 0.25);
  CameraModel cam;
  cam.f_px = 200.0;
  cam.v0 = 239.5;
  const lpr::PoseEstimate pose = lpr::estimate_pose(frame, cam);
  ASSERT_TRUE(pose.valid);
  EXPECT_NEAR(pose.pitch_rad, kPi / 4.0, 0.01);
}

TEST(Pose, VanishingRowGridIsRecovered) {
  CameraModel cam;
  cam.f_px = 500.0;
  cam.v0 = 239.5;
  for (const double dv : {0.0, 50.0, -50.0, 100.0, -100.0, 200.0, -200.0}) {
    const Raster frame = crossing_strokes(640, 480, 319.5, 239.5 + dv, 0.25);
    const lpr::PoseEstimate pose = lpr::estimate_pose(frame, cam);
    ASSERT_TRUE(pose.valid) << "dv " << dv;
    EXPECT_NEAR(pose.pitch_rad, std::atan(dv / cam.f_px), 0.01) << "dv " << dv;
  }
}

TEST(Pose, RenderedLanesRecoverCameraPitch) {
  CameraModel cam;
  cam.f_px = 1000.0;
  cam.v0 = 359.5;
  for (const double deg : {0.0, 1.0, 2.0, 3.0}) {
    const double pitch = deg * kPi / 180.0;
    const lpr::RenderedScene scene = lpr::render_scene(lanes_scene(pitch));
    const lpr::PoseEstimate pose = lpr::estimate_pose(scene.image, cam);
    ASSERT_TRUE(pose.valid) << "pitch " << deg;
    EXPECT_NEAR(pose.pitch_rad, pitch, 0.01) << "pitch " << deg;
    EXPECT_NEAR(pose.roll_rad, 0.0, 0.01) << "pitch " << deg;
  }
}

TEST(Pose, DegenerateScenesAreInvalid) {
  CameraModel cam;
  cam.f_px = 500.0;
  cam.v0 = 239.5;
  EXPECT_FALSE(lpr::estimate_pose(Raster(640, 480, 150), cam).valid);
  EXPECT_FALSE(lpr::estimate_pose(Raster(), cam).valid);

  // a single stroke yields only (near-)parallel lines
  Raster one(640, 480, 220);
  for (int x = 0; x < 640; ++x) {
    const double yc = 100.0 + 0.25 * x;
    for (int y = -2; y <= 2; ++y) {
      const int yy = static_cast<int>(std::lround(yc)) + y;
      if (yy >= 0 && yy < 480) one.at(x, yy) = 30;
    }
  }
  EXPECT_FALSE(lpr::estimate_pose(one, cam).valid);
}

TEST(Pose, SteepLinesAreFilteredOut) {
  // One shallow stroke plus one steep (~68 degree) stroke: the steep pair
  // falls outside the default 45-degree gate, leaving only the two parallel
  // edges of the shallow stroke and no vanishing point.
  Raster frame(640, 480, 220);
  auto paint = [&](double slope) {
    for (int x = 0; x < 640; ++x) {
      const double yc = 239.5 + slope * (x - 319.5);
      for (int dy = -2; dy <= 2; ++dy) {
        const int yy = static_cast<int>(std::lround(yc)) + dy;
        if (yy >= 0 && yy < 480) frame.at(x, yy) = 30;
      }
    }
  };
  paint(0.25);
  paint(2.5);
  CameraModel cam;
  cam.f_px = 500.0;
  cam.v0 = 239.5;
  EXPECT_FALSE(lpr::estimate_pose(frame, cam).valid);
}

TEST(Pose, HeightCorrectionIdentityIsExact) {
  lpr::PoseEstimate pose;
  pose.pitch_rad = 0.3;
  pose.roll_rad = 0.1;
  pose.valid = true;
  const lpr::HeightCorrection hc = lpr::correct_height(123.456, pose, 0.0, 0.0);
  EXPECT_TRUE(hc.applied);
  EXPECT_EQ(hc.value, 123.456);  // bitwise: the cosine ratio is exactly 1
}

TEST(Pose, TwoDegreePitchDeltaExample) {
  lpr::PoseEstimate pose;
  pose.valid = true;  // level pose
  const double delta = 2.0 * kPi / 180.0;
  const lpr::HeightCorrection hc = lpr::correct_height(100.0, pose, delta, 0.0);
  ASSERT_TRUE(hc.applied);
  EXPECT_NEAR(hc.value, 100.0610, 1e-3);
}

TEST(Pose, HeightCorrectionRoundTrips) {
  lpr::PoseEstimate pose;
  pose.pitch_rad = 0.05;
  pose.roll_rad = -0.02;
  pose.valid = true;
  const double dp = 0.04, dr = 0.03;
  const lpr::HeightCorrection fwd = lpr::correct_height(150.0, pose, dp, dr);
  ASSERT_TRUE(fwd.applied);
  lpr::PoseEstimate moved = pose;
  moved.pitch_rad += dp;
  moved.roll_rad += dr;
  const lpr::HeightCorrection back =
      lpr::correct_height(fwd.value, moved, -dp, -dr);
  ASSERT_TRUE(back.applied);
  EXPECT_NEAR(back.value, 150.0, 1e-9);
}

TEST(Pose, GrazingAnglesPassThrough) {
  lpr::PoseEstimate pose;
  pose.pitch_rad = 1.47;  // cos just above the guard
  pose.valid = true;
  const lpr::HeightCorrection hc = lpr::correct_height(100.0, pose, 0.2, 0.0);
  EXPECT_FALSE(hc.applied);
  EXPECT_DOUBLE_EQ(hc.value, 100.0);
}

TEST(Pose, InvalidPoseLeavesHeightUntouched) {
  const lpr::PoseEstimate pose;  // valid = false
  const lpr::HeightCorrection hc = lpr::correct_height(88.0, pose, 0.1, 0.1);
  EXPECT_FALSE(hc.applied);
  EXPECT_DOUBLE_EQ(hc.value, 88.0);
}
