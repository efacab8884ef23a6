#include "holoimg/config.hpp"
#include "holoimg/errors.hpp"
#include "holoimg/scene.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace holoimg;

TEST(LinearIndex, FirstEntryIsOne) { EXPECT_EQ(linear_index(1, 1, 81), 1u); }

TEST(LinearIndex, SecondFrequencyBlock) { EXPECT_EQ(linear_index(81, 2, 81), 162u); }

TEST(LinearIndex, RoundTripOnSmallGrid) {
  for (std::size_t s = 1; s <= 5; ++s) {
    for (std::size_t l = 1; l <= 3; ++l) {
      EXPECT_EQ(split_index(linear_index(s, l, 5), 5), std::make_pair(s, l));
    }
  }
}

TEST(LinearIndex, BijectionUpToSixteen) {
  for (std::size_t n = 1; n <= 16; ++n) {
    for (std::size_t s_count = 1; s_count <= 16; ++s_count) {
      std::set<std::size_t> seen;
      for (std::size_t s = 1; s <= n; ++s) {
        for (std::size_t l = 1; l <= s_count; ++l) {
          const auto i = linear_index(s, l, n);
          ASSERT_GE(i, 1u);
          ASSERT_LE(i, n * s_count);
          seen.insert(i);
        }
      }
      ASSERT_EQ(seen.size(), n * s_count);
    }
  }
}

TEST(LinearIndex, OutOfRangeThrows) {
  EXPECT_THROW(linear_index(0, 1, 4), IndexError);
  EXPECT_THROW(linear_index(5, 1, 4), IndexError);
  EXPECT_THROW(linear_index(1, 0, 4), IndexError);
  EXPECT_THROW(split_index(0, 4), IndexError);
}

TEST(ArrayGeometry, Equispaced81Elements) {
  const auto g = ArrayGeometry::equispaced(500.0, 81);
  ASSERT_EQ(g.size(), 81u);
  EXPECT_TRUE(g.colocated());
  EXPECT_NEAR(g.aperture(), 500.0, 1e-9);
  EXPECT_NEAR(g.sources()[1].x() - g.sources()[0].x(), 6.25, 1e-12);
  EXPECT_NEAR(g.center().x(), 0.0, 1e-9);
}

TEST(ArrayGeometry, RejectsDuplicatePositions) {
  EXPECT_THROW(ArrayGeometry({Point2(0, 0), Point2(0, 0)}), ValidationError);
}

TEST(ArrayGeometry, SeparateReceiversAreNotColocated) {
  const ArrayGeometry g({Point2(-1, 0), Point2(1, 0)}, {Point2(0, 0)});
  EXPECT_FALSE(g.colocated());
  EXPECT_EQ(g.receiver_count(), 1u);
}

TEST(FrequencyGrid, Band580To620) {
  const auto f = FrequencyGrid::equispaced_thz(580.0, 620.0, 16, 600.0);
  EXPECT_EQ(f.size(), 16u);
  EXPECT_NEAR(f.bandwidth_thz(), 40.0, 1e-9);
  EXPECT_NEAR(f.omega(0), 580.0 / 600.0, 1e-15);
  EXPECT_NEAR(f.lambda0_m(), 5e-7, 1e-20);
}

TEST(FrequencyGrid, RejectsNonIncreasing) {
  EXPECT_THROW(FrequencyGrid({1.0, 1.0}, 600.0), ValidationError);
  EXPECT_THROW(FrequencyGrid({1.0, -1.0}, 600.0), ValidationError);
  EXPECT_THROW(FrequencyGrid({}, 600.0), ValidationError);
}

TEST(ImageWindow, SinglePixelSitsAtCellCentre) {
  const ImageWindow iw(Point2(3.0, 7.0), {2.0, 4.0}, {2.0, 4.0});
  const auto pts = grid_points(iw);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_DOUBLE_EQ(pts[0].x(), 4.0);
  EXPECT_DOUBLE_EQ(pts[0].y(), 9.0);
}

TEST(ImageWindow, TwoByTwoDistances) {
  const ImageWindow iw(Point2(0, 0), {2.0, 2.0}, {1.0, 1.0});
  const auto pts = grid_points(iw);
  ASSERT_EQ(pts.size(), 4u);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      const double d = (pts[a] - pts[b]).norm();
      EXPECT_TRUE(std::abs(d - 1.0) < 1e-12 || std::abs(d - std::sqrt(2.0)) < 1e-12) << d;
    }
  }
}

TEST(ImageWindow, FullWindowHas6400Pixels) {
  const auto iw = ImageWindow::centered(Point2(0, 10000), {160.0, 80.0}, {2.0, 1.0});
  EXPECT_EQ(iw.nx(), 80u);
  EXPECT_EQ(iw.nz(), 80u);
  EXPECT_EQ(iw.size(), 6400u);
}

TEST(ImageWindow, RangeIndexIsFastest) {
  const auto iw = ImageWindow::centered(Point2(0, 100), {8.0, 6.0}, {2.0, 1.0});
  EXPECT_EQ(iw.index(0, 1), 1u);
  EXPECT_EQ(iw.index(1, 0), iw.nz());
  for (std::size_t k = 0; k < iw.size(); ++k) {
    const auto [ix, iz] = iw.coords(k);
    EXPECT_EQ(iw.index(ix, iz), k);
    EXPECT_EQ(iw.nearest_index(iw.point(k)), k);
  }
}

TEST(ImageWindow, PointsInsideBoundingBox) {
  const auto iw = ImageWindow::centered(Point2(5, 50), {12.0, 9.0}, {3.0, 1.5});
  const auto pts = grid_points(iw);
  EXPECT_EQ(pts.size(), iw.size());
  for (const auto& p : pts) {
    EXPECT_GE(p.x(), iw.origin().x());
    EXPECT_LE(p.x(), iw.origin().x() + iw.extent().x());
    EXPECT_GE(p.y(), iw.origin().y());
    EXPECT_LE(p.y(), iw.origin().y() + iw.extent().y());
  }
}

TEST(ImageWindow, ExtentMustBeMultipleOfPitch) {
  EXPECT_THROW(ImageWindow(Point2(0, 0), {5.0, 4.0}, {2.0, 1.0}), ValidationError);
  EXPECT_THROW(ImageWindow(Point2(0, 0), {4.0, 4.0}, {0.0, 1.0}), ValidationError);
}

TEST(Scene, RejectsEmptyAndZeroReflectivity) {
  EXPECT_THROW(Scene({}), ValidationError);
  EXPECT_THROW(Scene({{Point2(0, 10), Complex(0.0)}}), ValidationError);
}

TEST(Scene, OffGridPositionsAreAccepted) {
  const Scene s({{Point2(0.37, 10.91), Complex(1.0, 0.5)}});
  EXPECT_EQ(s.size(), 1u);
}
