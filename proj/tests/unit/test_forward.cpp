#include "helpers.hpp"

#include "holoimg/errors.hpp"
#include "holoimg/forward.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

using namespace holoimg;
using namespace holoimg::testing;

namespace {

std::size_t numerical_rank(const CMatrix& m, double rel) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv(i) > rel * sv(0);
  return r;
}

}  // namespace

TEST(GreenVector, SymmetricElementsSeeEqualValues) {
  const auto g = ArrayGeometry::equispaced(100.0, 5);
  const auto v = green_vector(Point2(0, 500), 1.0, g.sources(), Medium::homogeneous());
  EXPECT_NEAR(std::abs(v(0) - v(4)), 0.0, 1e-18);
  EXPECT_NEAR(std::abs(v(1) - v(3)), 0.0, 1e-18);
  for (int r = 0; r < 5; ++r) {
    EXPECT_NEAR(std::abs(v(r)), 1.0 / (4.0 * kPi * (g.sources()[r] - Point2(0, 500)).norm()), 1e-18);
  }
}

TEST(GreenVector, RandomMediumMatchesGreenRandom) {
  const auto g = ArrayGeometry::equispaced(100.0, 5);
  const Medium m = random_medium(g, 500.0, 50.0, 0.3, 20.0, 4);
  const Point2 y(10, 520);
  const auto v = green_vector(y, 1.01, g.sources(), m);
  for (int r = 0; r < 5; ++r) {
    EXPECT_EQ(v(r), green_random(g.sources()[r], y, 1.01, *m.field(), m.sigma(), 20.0));
  }
}

TEST(GreenVector, CoincidentPointThrows) {
  const auto g = ArrayGeometry::equispaced(100.0, 5);
  EXPECT_THROW(green_vector(g.sources()[2], 1.0, g.sources(), Medium::homogeneous()), DomainError);
}

TEST(ResponseSingle, SingleScattererIsRankOneOuterProduct) {
  const auto g = ArrayGeometry::equispaced(100.0, 9);
  const Scene s({{Point2(3, 400), Complex(1.0)}});
  const auto p = response_single(s, g, Medium::homogeneous(), 1.0);
  const auto v = green_vector(Point2(3, 400), 1.0, g.sources(), Medium::homogeneous());
  EXPECT_LT(rel_diff(p, v * v.transpose()), 1e-14);
  EXPECT_EQ(numerical_rank(p, 1e-10), 1u);
}

TEST(ResponseSingle, ColocatedIsSymmetricInAllMedia) {
  const Desk d;
  const Scene s = random_scene(4, d.range, 1);
  const Medium hom = Medium::homogeneous();
  const Medium ran = random_medium(d.geometry, d.range, 60.0, 0.2, 100.0, 3);
  for (const Medium* m : {&hom, &ran}) {
    const auto p = response_single(s, d.geometry, *m, 1.01);
    EXPECT_LE(max_abs(p - p.transpose()), 1e-12 * max_abs(p));
  }
}

TEST(ResponseSingle, TwoScatterersHaveTwoSingularValues) {
  const auto g = ArrayGeometry::equispaced(500.0, 21);
  const Scene s = random_scene(2, 10000.0, 5);
  const auto p = response_single(s, g, Medium::homogeneous(), 1.0);
  Eigen::JacobiSVD<CMatrix> svd(p);
  EXPECT_LE(svd.singularValues()(2), 1e-10 * svd.singularValues()(0));
  EXPECT_GT(svd.singularValues()(1), 1e-6 * svd.singularValues()(0));
}

TEST(ResponseSingle, ScattererOnElementThrows) {
  const auto g = ArrayGeometry::equispaced(100.0, 5);
  const Scene s({{g.sources()[1], Complex(1.0)}});
  EXPECT_THROW(response_single(s, g, Medium::homogeneous(), 1.0), DomainError);
}

TEST(ResponseMulti, BlocksMatchSingleFrequencyResponses) {
  const Desk d;
  const Scene s = random_scene(3, d.range, 2);
  const Medium m = random_medium(d.geometry, d.range, 60.0, 0.2, 100.0, 6);
  const auto p = response_multi(s, d.geometry, m, d.grid);
  for (std::size_t l = 0; l < d.grid.size(); ++l) {
    EXPECT_LT(rel_diff(p.block(l), response_single(s, d.geometry, m, d.grid.omega(l))), 1e-13);
  }
  const FrequencyGrid one({1.0}, 600.0);
  const auto p1 = response_multi(s, d.geometry, m, one);
  EXPECT_LT(rel_diff(p1.matrix(), response_single(s, d.geometry, m, 1.0)), 1e-14);
}

TEST(ResponseMulti, RankIsScatterersTimesFrequencies) {
  const auto g = ArrayGeometry::equispaced(500.0, 21);
  const auto f = FrequencyGrid::equispaced_thz(580.0, 620.0, 3, 600.0);
  const Scene s = random_scene(2, 10000.0, 9);
  const auto p = response_multi(s, g, Medium::homogeneous(), f);
  EXPECT_EQ(numerical_rank(p.matrix(), 1e-10), 6u);
}

TEST(ResponseMulti, BornLinearity) {
  const Desk d;
  const Scene a = random_scene(2, d.range, 1);
  const Scene b = random_scene(3, d.range, 2);
  std::vector<Scatterer> all = a.scatterers();
  all.insert(all.end(), b.scatterers().begin(), b.scatterers().end());
  const Medium m = Medium::homogeneous();
  const auto pa = response_multi(a, d.geometry, m, d.grid);
  const auto pb = response_multi(b, d.geometry, m, d.grid);
  const auto pab = response_multi(Scene(all), d.geometry, m, d.grid);
  EXPECT_LT(rel_diff(pa.matrix() + pb.matrix(), pab.matrix()), 1e-13);
}

TEST(ApplyIllumination, UnitVectorSelectsColumnAndMatchesDoubleSum) {
  const Desk d;
  const Scene s = random_scene(3, d.range, 4);
  const Medium m = Medium::homogeneous();
  const auto p = response_multi(s, d.geometry, m, d.grid);
  const std::size_t n = d.geometry.size();
  for (std::size_t i : {std::size_t{0}, std::size_t{17}, n * d.grid.size() - 1}) {
    CVector f = CVector::Zero(static_cast<Eigen::Index>(n * d.grid.size()));
    f(static_cast<Eigen::Index>(i)) = 1.0;
    const CVector b = apply_illumination(p, f);
    EXPECT_LT((b - p.matrix().col(static_cast<Eigen::Index>(i))).cwiseAbs().maxCoeff(), 1e-30);
    const std::size_t src = i % n, l = i / n;
    for (std::size_t r = 0; r < n; ++r) {
      Complex direct = 0.0;
      for (const auto& sc : s.scatterers()) {
        direct += sc.reflectivity *
                  green_homogeneous(d.geometry.sources()[r], sc.position, d.grid.omega(l)) *
                  green_homogeneous(sc.position, d.geometry.sources()[src], d.grid.omega(l));
      }
      // Phases reach omega * L / c0 ~ 6e4 rad, so agreement is limited to ~1e-11 relative.
      EXPECT_LE(std::abs(b(static_cast<Eigen::Index>(r)) - direct), 1e-9 * std::abs(direct));
    }
  }
}

TEST(ApplyIllumination, LinearAndProtocolMix) {
  const Desk d;
  const auto p = response_multi(random_scene(2, d.range, 3), d.geometry, Medium::homogeneous(), d.grid);
  const Eigen::Index ns = static_cast<Eigen::Index>(d.geometry.size() * d.grid.size());
  const CVector f1 = random_cvector(ns, 1), f2 = random_cvector(ns, 2);
  const CVector lhs = apply_illumination(p, f1 + f2);
  const CVector rhs = apply_illumination(p, f1) + apply_illumination(p, f2);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13 * lhs.cwiseAbs().maxCoeff());
  CVector mix = CVector::Zero(ns);
  mix(3) = 1.0;
  mix(40) = Complex(0.0, -1.0);
  const CVector b = apply_illumination(p, mix);
  const CVector expect = p.matrix().col(3) - kI * p.matrix().col(40);
  EXPECT_LE((b - expect).cwiseAbs().maxCoeff(), 1e-14 * expect.cwiseAbs().maxCoeff());
  EXPECT_THROW(apply_illumination(p, CVector::Zero(ns - 1)), ValidationError);
}

TEST(Intensities, BasicProperties) {
  const CVector zero = CVector::Zero(4);
  EXPECT_EQ(intensities(zero).maxCoeff(), 0.0);
  const CVector b = random_cvector(6, 7);
  const RVector a = intensities(b);
  const RVector r = intensities(b * std::polar(1.0, 0.83));
  EXPECT_LE((a - r).cwiseAbs().maxCoeff(), 1e-14 * a.maxCoeff());
  EXPECT_NEAR(a.sum(), b.squaredNorm(), 1e-12 * b.squaredNorm());
  EXPECT_GE(a.minCoeff(), 0.0);
}

TEST(AddNoise, ReproducibleAndAtRequestedPower) {
  const CVector b = random_cvector(4000, 8);
  const CVector n1 = add_noise(b, 20.0, 5);
  EXPECT_EQ(n1, add_noise(b, 20.0, 5));
  const double noise = (n1 - b).squaredNorm() / 4000.0;
  const double signal = b.squaredNorm() / 4000.0;
  EXPECT_NEAR(10.0 * std::log10(signal / noise), 20.0, 0.3);
}

TEST(ModelOperator, ScalarCase) {
  const ArrayGeometry g({Point2(0, 0)});
  const ImageWindow iw(Point2(-0.5, 99.5), {1.0, 1.0}, {1.0, 1.0});
  CVector f(1);
  f(0) = Complex(0.3, 0.2);
  const CMatrix a0 = model_operator_A0(f, 1.0, g, iw);
  const Complex g0 = green_homogeneous(Point2(0, 0), Point2(0, 100), 1.0);
  EXPECT_LE(std::abs(a0(0, 0) - g0 * g0 * f(0)), 1e-15 * std::abs(g0 * g0));
}

TEST(ModelOperator, OnGridReflectivityReproducesBornData) {
  const Desk d;
  const auto iw = ImageWindow::centered(Point2(0, d.range), {80.0, 40.0}, {4.0, 2.0});
  const double w = 1.0;
  RVector rho_abs;
  CVector rho = CVector::Zero(static_cast<Eigen::Index>(iw.size()));
  std::vector<Scatterer> sc;
  for (std::size_t k : {std::size_t{37}, std::size_t{205}}) {
    rho(static_cast<Eigen::Index>(k)) = Complex(1.0, 0.5 * k / 100.0);
    sc.push_back({iw.point(k), rho(static_cast<Eigen::Index>(k))});
  }
  const CVector f = random_cvector(static_cast<Eigen::Index>(d.geometry.size()), 3);
  const CMatrix a0 = model_operator_A0(f, w, d.geometry, iw);
  const CVector b = response_single(Scene(sc), d.geometry, Medium::homogeneous(), w) * f;
  const CVector model = a0 * rho;
  EXPECT_LE((model - b).cwiseAbs().maxCoeff(), 1e-12 * b.cwiseAbs().maxCoeff());
}

TEST(ModelOperator, SeparatedColumnsAreNearlyOrthogonal) {
  const auto g = ArrayGeometry::equispaced(500.0, 81);
  const auto iw = ImageWindow::centered(Point2(0, 10000), {160.0, 80.0}, {40.0, 20.0});
  CVector f = CVector::Zero(81);
  f(40) = 1.0;
  const CMatrix a0 = model_operator_A0(f, 1.0, g, iw);
  for (Eigen::Index i = 0; i < a0.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < a0.cols(); ++j) {
      // A single frequency resolves cross-range only; compare pixels at equal range.
      if (std::abs(iw.point(i).y() - iw.point(j).y()) > 1e-9) continue;
      if (std::abs(iw.point(i).x() - iw.point(j).x()) < 40.0) continue;
      const double c = std::abs(a0.col(i).dot(a0.col(j))) / (a0.col(i).norm() * a0.col(j).norm());
      EXPECT_LT(c, 0.2) << i << ' ' << j;
    }
  }
}

TEST(KmLinearEstimate, PeaksAtScattererAndIsPhaseInvariant) {
  const Desk d;
  const auto iw = ImageWindow::centered(Point2(0, d.range), {160.0, 80.0}, {4.0, 4.0});
  const std::size_t k_true = iw.index(13, 7);
  const Scene s({{iw.point(k_true), Complex(1.0)}});
  CVector f = CVector::Zero(static_cast<Eigen::Index>(d.geometry.size()));
  f(10) = 1.0;
  const CMatrix a0 = model_operator_A0(f, 1.0, d.geometry, iw);
  const CVector b = response_single(s, d.geometry, Medium::homogeneous(), 1.0) * f;
  const CVector rho = km_linear_estimate(a0, b);
  Eigen::Index arg = 0;
  rho.cwiseAbs().maxCoeff(&arg);
  // A single frequency resolves cross-range only, so compare the cross-range index.
  EXPECT_EQ(iw.coords(static_cast<std::size_t>(arg)).first, 13u);
  const CVector rot = km_linear_estimate(a0, b * std::polar(1.0, 1.3));
  EXPECT_LE((rot.cwiseAbs() - rho.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-12 * rho.cwiseAbs().maxCoeff());
  EXPECT_EQ(km_linear_estimate(a0, CVector::Zero(b.size())).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(km_linear_estimate(a0, CVector::Zero(3)), ValidationError);
}
