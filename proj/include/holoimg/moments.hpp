#pragma once

#include "holoimg/medium.hpp"
#include "holoimg/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace holoimg {

/// Two array points x, x', one target y and a frequency pair, all in internal units.
struct MomentProbe {
  Point2 x{0.0, 0.0};
  Point2 x_prime{10.0, 0.0};
  Point2 y{0.0, 10000.0};
  double omega = 1.025;
  double omega_prime = 0.975;
};

struct MomentConfig {
  double epsilon = 0.2;  ///< sigma = epsilon * lambda0 / sqrt(l L), with L = |x - y|
  double corr_len = 100.0;
  std::size_t realizations = 2000;
  std::uint64_t seed = 1;
  double grid_spacing = 0.0;  ///< 0 selects corr_len / 4
  MomentProbe probe;
};

struct MomentRow {
  std::string quantity;
  double theory = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  double z = 0.0;
};

struct MomentReport {
  std::vector<MomentRow> rows;
  double sigma = 0.0;
  double epsilon = 0.0;
  double tau_c = 0.0;    ///< omega0 * tau_c
  double omega_d = 0.0;  ///< Omega_d / omega0
  double x_d = 0.0;      ///< X_d / lambda0
  RegimeDiagnostics regime;

  bool passes(double z_max = 3.0) const;
};

/// Monte Carlo check of the closed-form travel-time moments:
/// mean and covariance of nu, mean of exp(i w nu), the cross moment, and the mean and
/// variance of G(x, y; w) conj(G(x', y; w')). Refuses fewer than 100 realizations.
MomentReport run_moments(const MomentConfig& config);

}  // namespace holoimg
