#include "helpers.hpp"

#include "holoimg/errors.hpp"
#include "holoimg/recovery.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace holoimg;
using namespace holoimg::testing;

namespace {

struct Case {
  Desk d;
  MultiFreqResponse p;
  std::size_t n, s, ns;

  explicit Case(bool random, std::uint64_t seed = 1)
      : p(response_multi(random_scene(4, d.range, seed), d.geometry,
                         random ? random_medium(d.geometry, d.range, 60.0, 0.2, 100.0, seed + 10)
                                : Medium::homogeneous(),
                         d.grid)),
        n(d.geometry.size()),
        s(d.grid.size()),
        ns(n * s) {}

  CMatrix truth_mr(std::size_t r) const {
    const CVector row = p.row(r - 1);
    return row.conjugate() * row.transpose();
  }
};

}  // namespace

TEST(Polarization, Orthogonal) {
  EXPECT_EQ(polarization_inner(2, 1, 1, 2), Complex(0.0, 0.0));
}

TEST(Polarization, SelfInnerProduct) {
  EXPECT_EQ(polarization_inner(4, 1, 1, 2), Complex(1.0, 0.0));
}

TEST(Polarization, RandomVectorsAgainstDirectInnerProduct) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CVector x = random_cvector(8, 2 * seed), y = random_cvector(8, 2 * seed + 1);
    const Complex got = polarization_inner((x + y).squaredNorm(), x.squaredNorm(), y.squaredNorm(),
                                           (x - kI * y).squaredNorm());
    const Complex want = x.dot(y);  // conj(x)^T y
    EXPECT_LE(std::abs(got - want), 1e-12 * x.norm() * y.norm());
  }
}

TEST(Polarization, NegativeInputsRejected) {
  EXPECT_THROW(polarization_inner(-1, 1, 1, 1), ValidationError);
}

TEST(Illumination, VectorsAndTags) {
  const CVector f = illumination_vector(Illumination::mix(2, 5), 6);
  EXPECT_EQ(f(1), Complex(1.0));
  EXPECT_EQ(f(4), Complex(0.0, -1.0));
  EXPECT_EQ(f.cwiseAbs().sum(), 2.0);
  EXPECT_EQ(Illumination::sum(3, 4).tag(), "sum(3,4)");
  EXPECT_THROW(illumination_vector(Illumination::sum(3, 3), 6), ValidationError);
  EXPECT_THROW(illumination_vector(Illumination::single(7), 6), IndexError);
  EXPECT_EQ(parse_illumination_kind("mix"), IlluminationKind::mix);
  EXPECT_THROW(parse_illumination_kind("diff"), ValidationError);
}

TEST(SimulatedOracle, MatchesForwardIntensities) {
  const Case c(false);
  SimulatedOracle o = SimulatedOracle::from_response(c.p, 5);
  for (const auto& f : {Illumination::single(3), Illumination::sum(2, 9), Illumination::mix(4, 100)}) {
    const CVector b = apply_illumination(c.p, illumination_vector(f, c.ns));
    EXPECT_NEAR(o.measure(f), intensities(b)(4), 1e-14 * intensities(b)(4));
  }
}

TEST(RecoverMr, ExactInHomogeneousAndRandomMedia) {
  for (bool random : {false, true}) {
    const Case c(random);
    for (std::size_t r : {std::size_t{1}, std::size_t{11}, std::size_t{21}}) {
      SimulatedOracle o = SimulatedOracle::from_response(c.p, r);
      const auto rec = recover_Mr(o, c.n, c.s);
      const CMatrix t = c.truth_mr(r);
      EXPECT_LE(max_abs(rec.m - t), 1e-10 * max_abs(t)) << "random=" << random << " r=" << r;
      EXPECT_EQ(rec.receiver, r);
    }
  }
}

TEST(RecoverMr, DiagonalIsTheSingleIntensities) {
  const Case c(false);
  SimulatedOracle o = SimulatedOracle::from_response(c.p, 7);
  const auto rec = recover_Mr(o, c.n, c.s);
  for (std::size_t i = 1; i <= c.ns; ++i) {
    EXPECT_EQ(rec.m(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(i - 1)),
              Complex(o.measure(Illumination::single(i))));
  }
}

TEST(RecoverMr, HermitianRankOne) {
  const Case c(true, 3);
  SimulatedOracle o = SimulatedOracle::from_response(c.p, 11);
  const CMatrix m = recover_Mr(o, c.n, c.s).m;
  EXPECT_EQ(max_abs(m - m.adjoint()), 0.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const auto& ev = es.eigenvalues();
  EXPECT_LE(std::abs(ev(ev.size() - 2)), 1e-8 * ev(ev.size() - 1));
  EXPECT_GE(ev(0), -1e-10 * ev(ev.size() - 1));
}

TEST(RecoverMr, ExactMeasurementBudget) {
  const Case c(false);
  SimulatedOracle o = SimulatedOracle::from_response(c.p, 2);
  CountingOracle counter(o);
  const auto rec = recover_Mr(counter, c.n, c.s);
  EXPECT_EQ(counter.count(), c.ns + c.ns * (c.ns - 1));
  EXPECT_EQ(rec.measurements, counter.count());
  EXPECT_EQ(protocol_measurement_count(c.ns, Protocol::hermitian), counter.count());
}

TEST(RecoverMr, OrderedProtocolAgrees) {
  const Case c(false);
  SimulatedOracle o = SimulatedOracle::from_response(c.p, 4);
  CountingOracle counter(o);
  const auto ordered = recover_Mr(counter, c.n, c.s, true);
  EXPECT_EQ(counter.count(), c.ns + 2 * c.ns * (c.ns - 1));
  EXPECT_LE(max_abs(ordered.m - c.truth_mr(4)), 1e-10 * max_abs(c.truth_mr(4)));
}

TEST(RecoverMr, OneByOne) {
  CVector row(1);
  row(0) = Complex(0.3, -0.4);
  SimulatedOracle o(row, 1);
  const auto rec = recover_Mr(o, 1, 1);
  ASSERT_EQ(rec.m.rows(), 1);
  EXPECT_NEAR(rec.m(0, 0).real(), 0.25, 1e-15);
  EXPECT_EQ(rec.measurements, 1u);
}

TEST(RecoverMr, NoisyDataStaysHermitian) {
  const Case c(false);
  SimulatedOracle o = SimulatedOracle::from_response(c.p, 6, 30.0, 99);
  const CMatrix m = recover_Mr(o, c.n, c.s, true).m;
  EXPECT_LE(max_abs(m - m.adjoint()), 1e-15 * max_abs(m));
  const double err = max_abs(m - c.truth_mr(6)) / max_abs(c.truth_mr(6));
  EXPECT_GT(err, 1e-6);
  EXPECT_LT(err, 0.5);
}

TEST(ReplayOracle, ReplaysAndReportsMissing) {
  const Case c(false);
  SimulatedOracle sim = SimulatedOracle::from_response(c.p, 3);
  std::vector<IntensityRecord> recs;
  for (const auto& f : protocol_illuminations(c.ns, Protocol::hermitian)) {
    recs.push_back({f, 3, sim.measure(f)});
  }
  ReplayOracle replay(recs, c.ns, 3);
  EXPECT_LE(max_abs(recover_Mr(replay, c.n, c.s).m - c.truth_mr(3)), 1e-10 * max_abs(c.truth_mr(3)));
  recs.erase(recs.begin() + static_cast<std::ptrdiff_t>(c.ns + 10));
  ReplayOracle gappy(recs, c.ns, 3);
  try {
    recover_Mr(gappy, c.n, c.s);
    FAIL() << "expected OracleError";
  } catch (const OracleError& e) {
    EXPECT_NE(std::string(e.what()).find("sum("), std::string::npos) << e.what();
  }
}

TEST(RecoverFullM, MatchesGramMatrix) {
  for (bool random : {false, true}) {
    const Case c(random, 5);
    std::vector<CMatrix> mrs;
    for (std::size_t r = 1; r <= c.n; ++r) {
      SimulatedOracle o = SimulatedOracle::from_response(c.p, r);
      mrs.push_back(recover_Mr(o, c.n, c.s).m);
    }
    const CMatrix m = recover_full_M(mrs, c.n, c.s, true);
    const CMatrix t = c.p.matrix().adjoint() * c.p.matrix();
    EXPECT_LE(max_abs(m - t), 1e-8 * max_abs(t)) << "random=" << random;
    EXPECT_LE(max_abs(m - m.adjoint()), 1e-12 * max_abs(m));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
    EXPECT_GE(es.eigenvalues()(0), -1e-10 * es.eigenvalues().maxCoeff());
    // Entrywise ratio has unit modulus and zero phase where the truth is not tiny.
    const double tol = 1e-6 * max_abs(t);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.cols(); ++j) {
        if (std::abs(t(i, j)) < tol) continue;
        const Complex q = m(i, j) / t(i, j);
        ASSERT_NEAR(std::abs(q), 1.0, 1e-8);
        ASSERT_NEAR(std::arg(q), 0.0, 1e-8);
      }
    }
  }
}

TEST(RecoverFullM, RefusesNonColocatedArrays) {
  const Case c(false);
  std::vector<CMatrix> mrs(c.n, CMatrix::Identity(static_cast<Eigen::Index>(c.ns),
                                                 static_cast<Eigen::Index>(c.ns)));
  EXPECT_THROW(recover_full_M(mrs, c.n, c.s, false), ValidationError);
}

TEST(RecoverFullM, SingularReferenceIsReported) {
  const Case c(false);
  std::vector<CMatrix> mrs;
  for (std::size_t r = 1; r <= c.n; ++r) mrs.push_back(c.truth_mr(r));
  for (auto& m : mrs) {
    m.row(0).setZero();
    m.col(0).setZero();
  }
  EXPECT_THROW(recover_full_M(mrs, c.n, c.s, true), SingularReferenceError);
}

TEST(ReferenceRow, PhaseReferencedResponseAndBudget) {
  const Case c(true, 2);
  std::vector<CVector> rows;
  std::size_t calls = 0;
  for (std::size_t r = 1; r <= c.n; ++r) {
    SimulatedOracle o = SimulatedOracle::from_response(c.p, r);
    CountingOracle counter(o);
    rows.push_back(recover_reference_row(counter, 1).row);
    calls += counter.count();
    EXPECT_EQ(counter.count(), c.ns + 2 * (c.ns - 1));
  }
  EXPECT_EQ(calls, c.n * protocol_measurement_count(c.ns, Protocol::reference_row));
  const CMatrix phat = recover_phase_referenced_response(rows, c.n, c.s);
  const CMatrix& p = c.p.matrix();
  EXPECT_LE(max_abs(phat.adjoint() * phat - p.adjoint() * p), 1e-8 * max_abs(p.adjoint() * p));
  const Complex g = phat.conjugate().cwiseProduct(p).sum();
  EXPECT_LE(max_abs(phat * (g / std::abs(g)) - p), 1e-8 * max_abs(p));
}

TEST(CrossProduct, MatchesDirectProduct) {
  const Case c(false, 8);
  std::vector<CMatrix> mrs;
  for (std::size_t r = 1; r <= c.n; ++r) mrs.push_back(c.truth_mr(r));
  const CMatrix& p = c.p.matrix();
  for (auto [i, k, j, col] : {std::tuple{1, 1, 1, 1}, std::tuple{3, 40, 17, 99}, std::tuple{21, 168, 2, 5}}) {
    const Complex want = std::conj(p(i - 1, k - 1)) * p(j - 1, col - 1);
    const Complex got = cross_product(mrs, c.n, c.s, i, k, j, col);
    EXPECT_LE(std::abs(got - want), 1e-9 * std::abs(want) + 1e-30);
  }
}

TEST(SingleFrequencyInterferometric, GramProperties) {
  const Case c(false, 4);
  const CMatrix p = c.p.block(2);
  const CMatrix m = single_frequency_interferometric(p);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  Eigen::JacobiSVD<CMatrix> svd(p);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double ev = es.eigenvalues()(es.eigenvalues().size() - 1 - i);
    const double sv = svd.singularValues()(i);
    EXPECT_NEAR(ev, sv * sv, 1e-10 * svd.singularValues()(0) * svd.singularValues()(0));
  }
  EXPECT_LE(es.eigenvalues()(es.eigenvalues().size() - 5),
            1e-10 * es.eigenvalues().maxCoeff());
  EXPECT_EQ(max_abs(single_frequency_interferometric(CMatrix::Zero(5, 5))), 0.0);
  EXPECT_THROW(single_frequency_interferometric(CMatrix::Zero(3, 5)), ValidationError);
}
