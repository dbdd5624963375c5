// Unit tests for edge detection, the Hough transform, homography solving,
// perspective warping, pyramidal Lucas-Kanade flow, and image/profile IO.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lpr/edges.hpp"
#include "lpr/flow.hpp"
#include "lpr/homography.hpp"
#include "lpr/hough.hpp"
#include "lpr/io.hpp"
#include "oracles.hpp"

using lpr::Raster;
using lpr::Vec2;

namespace {
constexpr double kPi = std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Canny

TEST(Canny, UniformImageHasNoEdges) {
  const Raster img(64, 48, 120);
  const Raster edges = lpr::canny(img, 50.0, 150.0);
  for (std::uint8_t v : edges.data) EXPECT_EQ(v, 0);
}

TEST(Canny, VerticalStepProducesOneThinEdgeColumn) {
  Raster img(64, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 64; ++x) img.at(x, y) = x < 32 ? 40 : 200;
  const Raster edges = lpr::canny(img, 50.0, 150.0);
  for (int y = 0; y < 32; ++y) {
    int count = 0;
    for (int x = 0; x < 64; ++x) {
      if (edges.at(x, y) == 0) continue;
      ++count;
      EXPECT_GE(x, 30) << "row " << y;
      EXPECT_LE(x, 33) << "row " << y;
    }
    EXPECT_EQ(count, 1) << "row " << y;  // non-maximum suppression keeps one
  }
}

TEST(Canny, ContrastBelowLowThresholdIsSilent) {
  Raster img(64, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 64; ++x) img.at(x, y) = x < 32 ? 100 : 110;
  // a 10-level step peaks at Sobel magnitude 40, below low = 50
  const Raster edges = lpr::canny(img, 50.0, 150.0);
  for (std::uint8_t v : edges.data) EXPECT_EQ(v, 0);
}

TEST(Canny, RejectsBadParameters) {
  EXPECT_THROW(lpr::canny(Raster(), 50.0, 150.0), std::invalid_argument);
  EXPECT_THROW(lpr::canny(Raster(8, 8, 0), -1.0, 150.0), std::invalid_argument);
  EXPECT_THROW(lpr::canny(Raster(8, 8, 0), 150.0, 50.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Hough transform

TEST(Hough, DiagonalLineIsFoundAtQuarterPi) {
  Raster edges(100, 100, 0);
  for (int i = 0; i < 100; ++i) edges.at(i, i) = 255;
  const auto lines = lpr::hough_lines(edges, 1.0, kPi / 180.0, 50);
  ASSERT_FALSE(lines.empty());
  EXPECT_GE(lines[0].votes, 90);
  EXPECT_NEAR(lines[0].angle, kPi / 4.0, kPi / 180.0 + 1e-9);
}

TEST(Hough, PerpendicularPairYieldsBothOrientations) {
  Raster edges(100, 100, 0);
  for (int x = 0; x < 100; ++x) edges.at(x, 20) = 255;  // horizontal
  for (int y = 0; y < 100; ++y) edges.at(60, y) = 255;  // vertical
  const auto lines = lpr::hough_lines(edges, 1.0, kPi / 180.0, 50);
  ASSERT_GE(lines.size(), 2u);
  bool saw_horizontal = false, saw_vertical = false;
  for (const auto& l : lines) {
    if (std::abs(l.angle) < 0.02 && l.votes >= 90) saw_horizontal = true;
    if (std::abs(std::abs(l.angle) - kPi / 2.0) < 0.02 && l.votes >= 90)
      saw_vertical = true;
  }
  EXPECT_TRUE(saw_horizontal);
  EXPECT_TRUE(saw_vertical);
}

TEST(Hough, BlankEdgeMapYieldsNoLines) {
  EXPECT_TRUE(lpr::hough_lines(Raster(64, 64, 0)).empty());
}

TEST(Hough, RejectsBadParameters) {
  EXPECT_THROW(lpr::hough_lines(Raster()), std::invalid_argument);
  const Raster edges(16, 16, 0);
  EXPECT_THROW(lpr::hough_lines(edges, 0.0), std::invalid_argument);
  EXPECT_THROW(lpr::hough_lines(edges, 1.0, -0.1), std::invalid_argument);
  EXPECT_THROW(lpr::hough_lines(edges, 1.0, 0.01, 0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// homography

TEST(Homography, DefaultIsIdentity) {
  const lpr::Homography h;
  const Vec2 p = h.apply({3.0, 4.0});
  EXPECT_DOUBLE_EQ(p.x, 3.0);
  EXPECT_DOUBLE_EQ(p.y, 4.0);
}

TEST(Homography, UnitSquareToDoubleSquareIsPureScale) {
  const std::array<Vec2, 4> src{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const std::array<Vec2, 4> dst{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}};
  const lpr::Homography h = lpr::solve_homography(src, dst);
  const auto& m = h.matrix();
  EXPECT_NEAR(m[0], 2.0, 1e-9);
  EXPECT_NEAR(m[4], 2.0, 1e-9);
  EXPECT_NEAR(m[1], 0.0, 1e-9);
  EXPECT_NEAR(m[3], 0.0, 1e-9);
  EXPECT_NEAR(m[6], 0.0, 1e-12);
  EXPECT_NEAR(m[7], 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(m[8], 1.0);
}

TEST(Homography, RandomQuadCorrespondencesAreReproduced) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> jitter(-30.0, 30.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::array<Vec2, 4> src{{{jitter(rng), jitter(rng)},
                                   {200 + jitter(rng), jitter(rng)},
                                   {200 + jitter(rng), 120 + jitter(rng)},
                                   {jitter(rng), 120 + jitter(rng)}}};
    const std::array<Vec2, 4> dst{{{jitter(rng), jitter(rng)},
                                   {300 + jitter(rng), jitter(rng)},
                                   {300 + jitter(rng), 90 + jitter(rng)},
                                   {jitter(rng), 90 + jitter(rng)}}};
    const lpr::Homography h = lpr::solve_homography(src, dst);
    for (int i = 0; i < 4; ++i) {
      const Vec2 q = h.apply(src[i]);
      ASSERT_NEAR(q.x, dst[i].x, 1e-6) << "trial " << trial;
      ASSERT_NEAR(q.y, dst[i].y, 1e-6) << "trial " << trial;
    }
  }
}

TEST(Homography, CollinearPointsAreRejected) {
  const std::array<Vec2, 4> collinear{{{0, 0}, {1, 1}, {2, 2}, {5, 0}}};
  const std::array<Vec2, 4> square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  EXPECT_THROW(lpr::solve_homography(collinear, square), std::invalid_argument);
  EXPECT_THROW(lpr::solve_homography(square, collinear), std::invalid_argument);
}

TEST(Homography, InverseRoundTripsPoints) {
  const std::array<Vec2, 4> src{{{0, 0}, {100, 0}, {100, 50}, {0, 50}}};
  const std::array<Vec2, 4> dst{{{3, 7}, {120, -2}, {131, 68}, {-5, 55}}};
  const lpr::Homography h = lpr::solve_homography(src, dst);
  const lpr::Homography inv = h.inverse();
  for (const Vec2 p : {Vec2{10, 20}, Vec2{55, 5}, Vec2{90, 49}}) {
    const Vec2 q = inv.apply(h.apply(p));
    EXPECT_NEAR(q.x, p.x, 1e-9);
    EXPECT_NEAR(q.y, p.y, 1e-9);
  }
}

TEST(Homography, PointMappingToInfinityThrows) {
  const lpr::Homography h(std::array<double, 9>{1, 0, 0, 0, 1, 0, 1, 0, 1});
  EXPECT_THROW(h.apply({-1.0, 0.0}), std::invalid_argument);
}

TEST(Homography, SingularMatrixIsRejected) {
  EXPECT_THROW(lpr::Homography(std::array<double, 9>{1, 0, 0, 2, 0, 0, 0, 0, 1}),
               std::invalid_argument);
  EXPECT_THROW(lpr::Homography(std::array<double, 9>{1, 0, 0, 0, 1, 0, 0, 0, 0}),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// perspective warp

TEST(Warp, IdentityReproducesImage) {
  std::mt19937 rng(8);
  const Raster img = oracle::random_gray(37, 23, rng);
  const Raster out = lpr::warp_perspective(img, lpr::Homography(), 37, 23);
  EXPECT_TRUE(out == img);
}

TEST(Warp, UpscaleOfUniformImageStaysUniform) {
  const Raster img(20, 10, 99);
  const lpr::Homography h(std::array<double, 9>{2, 0, 0, 0, 2, 0, 0, 0, 1});
  const Raster out = lpr::warp_perspective(img, h, 39, 19);
  for (std::uint8_t v : out.data) EXPECT_EQ(v, 99);
}

TEST(Warp, QuadIsRectifiedToFullOutput) {
  Raster img(200, 150, 230);
  // dark convex quad, roughly a tilted plate
  const std::array<Vec2, 4> quad{{{40, 30}, {160, 42}, {150, 110}, {50, 95}}};
  auto inside = [&](double x, double y) {
    double prev = 0.0;
    for (int i = 0; i < 4; ++i) {
      const Vec2 a = quad[i], b = quad[(i + 1) % 4];
      const double c = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
      if (c * prev < 0.0) return false;
      if (c != 0.0) prev = c;
    }
    return true;
  };
  for (int y = 0; y < 150; ++y)
    for (int x = 0; x < 200; ++x)
      if (inside(x, y)) img.at(x, y) = 20;
  const int W = 120, H = 60;
  const std::array<Vec2, 4> rect{
      {{0, 0}, {W - 1.0, 0}, {W - 1.0, H - 1.0}, {0, H - 1.0}}};
  const lpr::Homography h = lpr::solve_homography(quad, rect);
  const Raster out = lpr::warp_perspective(img, h, W, H);
  EXPECT_LT(out.at(W / 2, H / 2), 100);
  EXPECT_LT(out.at(2, 2), 100);
  EXPECT_LT(out.at(W - 3, H - 3), 100);
}

TEST(Warp, RejectsBadOutputSize) {
  const Raster img(8, 8, 0);
  EXPECT_THROW(lpr::warp_perspective(img, lpr::Homography(), 0, 5),
               std::invalid_argument);
  EXPECT_THROW(lpr::warp_perspective(Raster(), lpr::Homography(), 5, 5),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Lucas-Kanade optical flow

TEST(Flow, NoMotionStaysPut) {
  const Raster img = oracle::smooth_texture(128, 96);
  const std::vector<Vec2> pts{{40, 40}, {64, 48}, {90, 30}, {30, 70}};
  const lpr::FlowResult r = lpr::lk_flow(img, img, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ASSERT_TRUE(r.status[i]);
    EXPECT_NEAR(r.points[i].x, pts[i].x, 0.01);
    EXPECT_NEAR(r.points[i].y, pts[i].y, 0.01);
  }
}

TEST(Flow, RecoversKnownIntegerShift) {
  const Raster prev = oracle::smooth_texture(128, 96);
  const Raster next = oracle::smooth_texture(128, 96, 2.0, 3.0);
  const std::vector<Vec2> pts{{40, 40}, {64, 48}, {80, 60}, {50, 30}};
  const lpr::FlowResult r = lpr::lk_flow(prev, next, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ASSERT_TRUE(r.status[i]) << "point " << i;
    EXPECT_NEAR(r.points[i].x - pts[i].x, 2.0, 0.25) << "point " << i;
    EXPECT_NEAR(r.points[i].y - pts[i].y, 3.0, 0.25) << "point " << i;
  }
}

TEST(Flow, FlatRegionFailsStatus) {
  const Raster img(64, 64, 128);
  const lpr::FlowResult r = lpr::lk_flow(img, img, {{32, 32}});
  ASSERT_EQ(r.status.size(), 1u);
  EXPECT_FALSE(r.status[0]);
}

TEST(Flow, RejectsBadInputs) {
  const Raster a(32, 32, 0), b(16, 32, 0);
  EXPECT_THROW(lpr::lk_flow(a, b, {{5, 5}}), std::invalid_argument);
  EXPECT_THROW(lpr::lk_flow(Raster(), a, {{5, 5}}), std::invalid_argument);
  lpr::FlowConfig bad;
  bad.window = 4;  // even
  EXPECT_THROW(lpr::lk_flow(a, a, {{5, 5}}, bad), std::invalid_argument);
  bad.window = 15;
  bad.levels = 0;
  EXPECT_THROW(lpr::lk_flow(a, a, {{5, 5}}, bad), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// image IO

TEST(ImageIo, AsciiPgmRoundTrips) {
  std::mt19937 rng(15);
  const Raster img = oracle::random_gray(9, 7, rng);
  std::stringstream ss;
  lpr::write_pgm(ss, img, /*binary=*/false);
  EXPECT_TRUE(lpr::read_image(ss) == img);
}

TEST(ImageIo, BinaryPgmRoundTrips) {
  std::mt19937 rng(16);
  const Raster img = oracle::random_gray(33, 21, rng);
  std::stringstream ss;
  lpr::write_pgm(ss, img, /*binary=*/true);
  EXPECT_TRUE(lpr::read_image(ss) == img);
}

TEST(ImageIo, AsciiColorReducesToLuma) {
  std::stringstream ss("P3\n1 1\n255\n255 0 0\n");
  const Raster img = lpr::read_image(ss);
  ASSERT_EQ(img.width, 1);
  EXPECT_EQ(img.at(0, 0), 76);
}

TEST(ImageIo, BinaryColorReducesToLuma) {
  std::string data = "P6\n1 1\n255\n";
  data.push_back(static_cast<char>(255));
  data.push_back(static_cast<char>(0));
  data.push_back(static_cast<char>(0));
  std::stringstream ss(data);
  const Raster img = lpr::read_image(ss);
  EXPECT_EQ(img.at(0, 0), 76);
}

TEST(ImageIo, CommentsInHeaderAreSkipped) {
  std::stringstream ss("P2 # magic\n# a comment line\n2 1\n255\n7 9\n");
  const Raster img = lpr::read_image(ss);
  ASSERT_EQ(img.width, 2);
  EXPECT_EQ(img.at(0, 0), 7);
  EXPECT_EQ(img.at(1, 0), 9);
}

TEST(ImageIo, RejectsWideSamplesTruncationAndBadMagic) {
  std::stringstream wide("P2\n1 1\n65535\n1234\n");
  EXPECT_THROW(lpr::read_image(wide), std::runtime_error);
  std::stringstream trunc("P5\n4 4\n255\nab");
  EXPECT_THROW(lpr::read_image(trunc), std::runtime_error);
  std::stringstream magic("P7\n1 1\n255\n0\n");
  EXPECT_THROW(lpr::read_image(magic), std::runtime_error);
  std::stringstream range("P2\n1 1\n100\n101\n");
  EXPECT_THROW(lpr::read_image(range), std::runtime_error);
}

// ---------------------------------------------------------------------------
// depth map IO

TEST(DepthIo, RoundTripsExactFloats) {
  lpr::DepthMap d(3, 2);
  const float vals[] = {0.5f, 1.25f, -3.0f, 100.0f, 0.0f, 7.5f};
  for (int i = 0; i < 6; ++i) d.data[i] = vals[i];
  std::stringstream ss;
  lpr::write_depth_map(ss, d);
  const lpr::DepthMap back = lpr::read_depth_map(ss);
  ASSERT_EQ(back.width, 3);
  ASSERT_EQ(back.height, 2);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(back.data[i], vals[i]);
}

TEST(DepthIo, PositiveScaleMeansBigEndianSamples) {
  std::string data = "PF-GRAY\n2 1\n1.0\n";
  // 1.5f = 0x3FC00000, -2.0f = 0xC0000000, big-endian byte order
  const unsigned char bytes[] = {0x3F, 0xC0, 0x00, 0x00, 0xC0, 0x00, 0x00, 0x00};
  data.append(reinterpret_cast<const char*>(bytes), 8);
  std::stringstream ss(data);
  const lpr::DepthMap d = lpr::read_depth_map(ss);
  EXPECT_EQ(d.at(0, 0), 1.5f);
  EXPECT_EQ(d.at(1, 0), -2.0f);
}

TEST(DepthIo, InvertDepthFlipsPositiveSamplesOnly) {
  lpr::DepthMap d(4, 1);
  d.data = {2.0f, 0.5f, 0.0f, -1.0f};
  const lpr::DepthMap inv = lpr::invert_depth(d);
  EXPECT_EQ(inv.data[0], 0.5f);
  EXPECT_EQ(inv.data[1], 2.0f);
  EXPECT_EQ(inv.data[2], 0.0f);
  EXPECT_EQ(inv.data[3], 0.0f);
}

TEST(DepthIo, InverseDepthFlagAppliesInversionOnRead) {
  lpr::DepthMap d(1, 1);
  d.data = {4.0f};
  std::stringstream ss;
  lpr::write_depth_map(ss, d);
  const lpr::DepthMap back = lpr::read_depth_map(ss, /*inverse_depth=*/true);
  EXPECT_EQ(back.at(0, 0), 0.25f);
}

TEST(DepthIo, RejectsBadHeaderAndTruncation) {
  std::stringstream magic("PF\n1 1\n-1.0\n");
  EXPECT_THROW(lpr::read_depth_map(magic), std::runtime_error);
  std::stringstream dims("PF-GRAY\n0 4\n-1.0\n");
  EXPECT_THROW(lpr::read_depth_map(dims), std::runtime_error);
  std::stringstream scale("PF-GRAY\n1 1\n0\n");
  EXPECT_THROW(lpr::read_depth_map(scale), std::runtime_error);
  std::stringstream trunc("PF-GRAY\n2 2\n-1.0\nxy");
  EXPECT_THROW(lpr::read_depth_map(trunc), std::runtime_error);
}

// ---------------------------------------------------------------------------
// profile IO

TEST(ProfileIo, RoundTripsExactValues) {
  const std::map<std::string, double> vals{
      {"f_px", 1000.0}, {"char_height_m", 0.075}, {"u0", 639.5}};
  std::stringstream ss;
  lpr::write_profile(ss, vals);
  EXPECT_EQ(lpr::read_profile(ss), vals);
}

TEST(ProfileIo, SkipsCommentsAndLetsLaterDuplicatesWin) {
  std::stringstream ss(
      "# camera intrinsics\n"
      "\n"
      "f_px = 500   # first guess\n"
      "f_px = 750\n"
      "  v0=359.5\n");
  const auto vals = lpr::read_profile(ss);
  EXPECT_EQ(vals.size(), 2u);
  EXPECT_DOUBLE_EQ(vals.at("f_px"), 750.0);
  EXPECT_DOUBLE_EQ(vals.at("v0"), 359.5);
}

TEST(ProfileIo, ReportsLineNumberOfBadValue) {
  std::stringstream ss("a = 1\nb = x2\n");
  try {
    lpr::read_profile(ss);
    FAIL() << "expected a parse error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ProfileIo, RejectsMissingEqualsAndEmptyKey) {
  std::stringstream no_eq("f_px 100\n");
  EXPECT_THROW(lpr::read_profile(no_eq), std::runtime_error);
  std::stringstream no_key(" = 3\n");
  EXPECT_THROW(lpr::read_profile(no_key), std::runtime_error);
}

TEST(ProfileIo, CameraFromProfileAppliesAllKeys) {
  const std::map<std::string, double> vals{
      {"f_px", 1000.0},          {"u0", 639.5},
      {"v0", 359.5},             {"char_height_m", 0.075},
      {"plate_height_m", 0.152}, {"plate_width_m", 0.305},
      {"stroke_width_m", 0.008}, {"char_spacing_m", 0.010},
      {"border_thickness_m", 0.005}};
  const lpr::CameraModel cam = lpr::camera_from_profile(vals);
  EXPECT_DOUBLE_EQ(cam.f_px, 1000.0);
  EXPECT_DOUBLE_EQ(cam.u0, 639.5);
  EXPECT_DOUBLE_EQ(cam.v0, 359.5);
  EXPECT_DOUBLE_EQ(cam.char_height_m, 0.075);
  EXPECT_DOUBLE_EQ(cam.plate_height_m, 0.152);
  EXPECT_DOUBLE_EQ(cam.plate_width_m, 0.305);
  EXPECT_DOUBLE_EQ(cam.stroke_width_m, 0.008);
  EXPECT_DOUBLE_EQ(cam.char_spacing_m, 0.010);
  EXPECT_DOUBLE_EQ(cam.border_thickness_m, 0.005);
}

TEST(ProfileIo, UnknownKeyIsRejected) {
  EXPECT_THROW(lpr::camera_from_profile({{"focal", 100.0}}), std::runtime_error);
}
