#pragma once

#include "holoimg/random_field.hpp"
#include "holoimg/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace holoimg {

/// exp(i omega |x - y| / c0) / (4 pi |x - y|). Throws DomainError when x == y.
Complex green_homogeneous(const Point2& x, const Point2& y, double omega,
                          double c0 = kReferenceSpeed);

/// Random travel-time perturbation between x and y:
/// (sigma |x - y| / (2 c0)) * integral_0^1 mu(y + s (x - y)) ds,
/// by the composite midpoint rule with step min(l/4, |x - y|/64). Symmetric in x and y.
double nu(const Point2& x, const Point2& y, const RandomField& field, double sigma, double corr_len,
          double c0 = kReferenceSpeed);

/// green_homogeneous(x, y, omega) * exp(i omega nu(x, y)).
Complex green_random(const Point2& x, const Point2& y, double omega, const RandomField& field,
                     double sigma, double corr_len, double c0 = kReferenceSpeed);

/// Standard deviation of nu over a path of length L:
/// sqrt( sqrt(2 pi) sigma^2 l L / (4 c0^2) ).
double tau_c(double sigma, double corr_len, double path_length, double c0 = kReferenceSpeed);

/// Normalized covariance of nu across the array, C(r) = (1/r) int_0^r exp(-u^2/2) du.
double covariance_C(double r);

/// sigma_0 = lambda0 / sqrt(l L).
double characteristic_strength(double corr_len, double path_length, double lambda0 = 1.0);

struct DecoherenceParams {
  double omega_d;  ///< decoherence frequency, 1 / tau_c
  double x_d;      ///< decoherence length, sqrt(3) l / (omega0 tau_c)
};

DecoherenceParams decoherence_params(double tau_c, double corr_len, double omega0 = 1.0);

/// E{ exp(i omega nu(x) - i omega' nu(x')) } for two array points `offset` apart.
double moment_exp_cross(double omega, double omega_prime, double offset, double tau_c,
                        double corr_len);

/// Small-offset, narrow-band form exp(-(w - w')^2 / (2 Omega_d^2) - offset^2 / (2 X_d^2)).
double moment_exp_cross_gaussian(double omega, double omega_prime, double offset,
                                 const DecoherenceParams& params);

struct RandomMediumParams {
  double sigma = 0.0;
  double corr_len = 0.0;
  double c0 = kReferenceSpeed;
};

struct GreenProductMoments {
  Complex mean;           ///< E{ G(x, y; w) conj(G(x', y; w')) }
  double variance;        ///< Gaussian (Omega_d, X_d) form
  double variance_exact;  ///< |G0 G0'|^2 (1 - |E{exp(...)}|^2) with the exact cross moment
};

/// Mean and variance of G(x, y; w) conj(G(x', y; w')) under the random travel-time model.
/// tau_c is evaluated for the mean path length (|x - y| + |x' - y|) / 2.
GreenProductMoments moment_green_product(const Point2& x, const Point2& x_prime, const Point2& y,
                                         double omega, double omega_prime,
                                         const RandomMediumParams& medium);

struct RegimeDiagnostics {
  double weak_fluctuation_ratio = 0.0;  ///< sigma^2 L^3 / l^3, should be << 1
  double phase_ratio = 0.0;             ///< lambda^2 / (sigma^2 l L) = 1 / epsilon^2
  double sigma0 = 0.0;
  double epsilon = 0.0;
  bool valid = true;
  std::vector<std::string> warnings;
};

/// Checks the validity conditions of the random travel-time model.
/// Warns when sigma^2 L^3 / l^3 > 1, epsilon > 2, l < 10 lambda0 or L < 10 l.
RegimeDiagnostics validate_regime(double sigma, double corr_len, double path_length,
                                  double lambda0 = 1.0);

/// Propagation medium used to synthesize data. Immutable; safe to share across threads.
class Medium {
 public:
  static Medium homogeneous(double c0 = kReferenceSpeed);
  static Medium random_phase(double sigma, std::shared_ptr<const RandomField> field,
                             double c0 = kReferenceSpeed);

  bool is_homogeneous() const { return field_ == nullptr; }
  double c0() const { return c0_; }
  double sigma() const { return sigma_; }
  double corr_len() const;
  const RandomField* field() const { return field_.get(); }

  /// Zero in a homogeneous medium.
  double travel_time_perturbation(const Point2& x, const Point2& y) const;
  Complex green(const Point2& x, const Point2& y, double omega) const;

 private:
  Medium(double c0, double sigma, std::shared_ptr<const RandomField> field)
      : c0_(c0), sigma_(sigma), field_(std::move(field)) {}

  double c0_ = kReferenceSpeed;
  double sigma_ = 0.0;
  std::shared_ptr<const RandomField> field_;
};

}  // namespace holoimg
