#pragma once

#include "holoimg/config.hpp"
#include "holoimg/forward.hpp"
#include "holoimg/medium.hpp"
#include "holoimg/random_field.hpp"
#include "holoimg/scene.hpp"

#include <memory>
#include <random>

namespace holoimg::testing {

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_diff(const CMatrix& a, const CMatrix& b) { return max_abs(a - b) / max_abs(b); }

// Scatterers drawn uniformly in a 60 x 30 box around (0, range), unit-ish complex amplitudes.
inline Scene random_scene(std::size_t m, double range, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-30.0, 30.0), uz(-15.0, 15.0), ua(0.5, 1.5),
      uph(-kPi, kPi);
  std::vector<Scatterer> s;
  for (std::size_t j = 0; j < m; ++j) {
    s.push_back({Point2(ux(rng), range + uz(rng)), std::polar(ua(rng), uph(rng))});
  }
  return Scene(s);
}

inline CVector random_cvector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

inline CMatrix random_cmatrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

// Random medium whose field covers the array and everything within `reach` of (0, range).
inline Medium random_medium(const ArrayGeometry& g, double range, double reach, double epsilon,
                            double corr_len, std::uint64_t seed) {
  std::vector<Point2> pts = g.sources();
  pts.push_back(Point2(-reach, range - reach));
  pts.push_back(Point2(reach, range + reach));
  const auto spec = RandomFieldSpec::covering(pts, corr_len, corr_len / 4.0, 3.0 * corr_len);
  auto field = std::make_shared<const RandomField>(sample_mu_field(spec, seed));
  return Medium::random_phase(epsilon * characteristic_strength(corr_len, range), field);
}

struct Desk {
  ArrayGeometry geometry = ArrayGeometry::equispaced(500.0, 21);
  FrequencyGrid grid = FrequencyGrid::equispaced_thz(580.0, 620.0, 8, 600.0);
  double range = 10000.0;
};

}  // namespace holoimg::testing
