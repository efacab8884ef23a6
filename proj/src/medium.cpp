#include "holoimg/medium.hpp"

#include "holoimg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace holoimg {

Complex green_homogeneous(const Point2& x, const Point2& y, double omega, double c0) {
  const double r = (x - y).norm();
  if (!(r > 0.0)) throw DomainError("Green's function evaluated at coincident points");
  return std::polar(1.0 / (4.0 * kPi * r), omega * r / c0);
}

double nu(const Point2& x, const Point2& y, const RandomField& field, double sigma,
          double corr_len, double c0) {
  if (!(corr_len > 0.0)) throw ValidationError("correlation length must be > 0");
  const double len = (x - y).norm();
  if (sigma == 0.0 || len == 0.0) return 0.0;
  if (!field.covers(x) || !field.covers(y)) {
    throw DomainError("travel-time path leaves the random field grid");
  }
  // Integrate from the lexicographically smaller endpoint so nu(x, y) == nu(y, x) bitwise.
  const bool swap = std::tie(x.x(), x.y()) < std::tie(y.x(), y.y());
  const Point2& from = swap ? x : y;
  const Point2& to = swap ? y : x;
  const double step = std::min(0.25 * corr_len, len / 64.0);
  const auto n = static_cast<std::size_t>(std::ceil(len / step - 1e-12));
  const Point2 d = to - from;
  double sum = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double s = (static_cast<double>(m) + 0.5) / static_cast<double>(n);
    sum += field.value(from + s * d);
  }
  return sigma * len / (2.0 * c0) * (sum / static_cast<double>(n));
}

Complex green_random(const Point2& x, const Point2& y, double omega, const RandomField& field,
                     double sigma, double corr_len, double c0) {
  const Complex g0 = green_homogeneous(x, y, omega, c0);
  return g0 * std::polar(1.0, omega * nu(x, y, field, sigma, corr_len, c0));
}

double tau_c(double sigma, double corr_len, double path_length, double c0) {
  if (!(sigma >= 0.0) || !(corr_len > 0.0) || !(path_length > 0.0) || !(c0 > 0.0)) {
    throw ValidationError("tau_c needs sigma >= 0 and positive l, L, c0");
  }
  return std::sqrt(std::sqrt(2.0 * kPi) * sigma * sigma * corr_len * path_length /
                   (4.0 * c0 * c0));
}

double covariance_C(double r) {
  if (!(r >= 0.0)) throw DomainError("covariance_C needs r >= 0");
  if (r < 1e-3) {
    const double r2 = r * r;
    return 1.0 - r2 / 6.0 + r2 * r2 / 40.0;
  }
  return std::sqrt(0.5 * kPi) * std::erf(r / std::sqrt(2.0)) / r;
}

double characteristic_strength(double corr_len, double path_length, double lambda0) {
  if (!(corr_len > 0.0) || !(path_length > 0.0)) {
    throw ValidationError("characteristic strength needs positive l and L");
  }
  return lambda0 / std::sqrt(corr_len * path_length);
}

DecoherenceParams decoherence_params(double tau, double corr_len, double omega0) {
  if (!(tau > 0.0) || !(corr_len > 0.0) || !(omega0 > 0.0)) {
    throw ValidationError("decoherence_params needs positive tau_c, l, omega0");
  }
  return {1.0 / tau, std::sqrt(3.0) * corr_len / (omega0 * tau)};
}

double moment_exp_cross(double omega, double omega_prime, double offset, double tau,
                        double corr_len) {
  const double t2 = tau * tau;
  const double dw = omega - omega_prime;
  return std::exp(-0.5 * dw * dw * t2 -
                  omega * omega_prime * t2 * (1.0 - covariance_C(offset / corr_len)));
}

double moment_exp_cross_gaussian(double omega, double omega_prime, double offset,
                                 const DecoherenceParams& p) {
  const double dw = omega - omega_prime;
  return std::exp(-dw * dw / (2.0 * p.omega_d * p.omega_d) -
                  offset * offset / (2.0 * p.x_d * p.x_d));
}

GreenProductMoments moment_green_product(const Point2& x, const Point2& x_prime, const Point2& y,
                                         double omega, double omega_prime,
                                         const RandomMediumParams& medium) {
  const Complex g = green_homogeneous(x, y, omega, medium.c0);
  const Complex gp = green_homogeneous(x_prime, y, omega_prime, medium.c0);
  const double path = 0.5 * ((x - y).norm() + (x_prime - y).norm());
  const double offset = (x - x_prime).norm();
  const double scale = std::norm(g * std::conj(gp));
  if (medium.sigma == 0.0) return {g * std::conj(gp), 0.0, 0.0};

  const double tau = tau_c(medium.sigma, medium.corr_len, path, medium.c0);
  // omega0 = 1 in internal units.
  const DecoherenceParams dp = decoherence_params(tau, medium.corr_len, 1.0);
  const double cross = moment_exp_cross(omega, omega_prime, offset, tau, medium.corr_len);
  const double dw = omega - omega_prime;
  GreenProductMoments out;
  out.mean = g * std::conj(gp) * cross;
  out.variance = scale * (1.0 - std::exp(-dw * dw / (dp.omega_d * dp.omega_d) -
                                         offset * offset / (dp.x_d * dp.x_d)));
  out.variance_exact = scale * (1.0 - cross * cross);
  return out;
}

RegimeDiagnostics validate_regime(double sigma, double corr_len, double path_length,
                                  double lambda0) {
  if (!(sigma > 0.0) || !(corr_len > 0.0) || !(path_length > 0.0) || !(lambda0 > 0.0)) {
    throw ValidationError("validate_regime needs positive sigma, l, L, lambda0");
  }
  RegimeDiagnostics d;
  d.weak_fluctuation_ratio = sigma * sigma * std::pow(path_length / corr_len, 3);
  d.phase_ratio = lambda0 * lambda0 / (sigma * sigma * corr_len * path_length);
  d.sigma0 = characteristic_strength(corr_len, path_length, lambda0);
  d.epsilon = sigma / d.sigma0;

  auto warn = [&d](const std::string& msg) {
    d.warnings.push_back(msg);
    d.valid = false;
  };
  if (d.weak_fluctuation_ratio > 1.0) {
    std::ostringstream os;
    os << "sigma^2 L^3 / l^3 = " << d.weak_fluctuation_ratio
       << " exceeds 1: amplitude fluctuations are not negligible";
    warn(os.str());
  }
  if (d.epsilon > 2.0) {
    std::ostringstream os;
    os << "epsilon = " << d.epsilon << " >> 1: phases are fully decorrelated";
    warn(os.str());
  }
  if (corr_len < 10.0 * lambda0) warn("correlation length is not >> wavelength");
  if (path_length < 10.0 * corr_len) warn("propagation distance is not >> correlation length");
  return d;
}

// ---------------------------------------------------------------------------

Medium Medium::homogeneous(double c0) {
  if (!(c0 > 0.0)) throw ValidationError("wave speed must be > 0");
  return Medium(c0, 0.0, nullptr);
}

Medium Medium::random_phase(double sigma, std::shared_ptr<const RandomField> field, double c0) {
  if (!(c0 > 0.0)) throw ValidationError("wave speed must be > 0");
  if (!(sigma >= 0.0)) throw ValidationError("fluctuation strength must be >= 0");
  if (!field) throw ValidationError("random medium needs a field realization");
  return Medium(c0, sigma, std::move(field));
}

double Medium::corr_len() const { return field_ ? field_->spec().corr_len : 0.0; }

double Medium::travel_time_perturbation(const Point2& x, const Point2& y) const {
  if (!field_) return 0.0;
  return nu(x, y, *field_, sigma_, field_->spec().corr_len, c0_);
}

Complex Medium::green(const Point2& x, const Point2& y, double omega) const {
  const Complex g0 = green_homogeneous(x, y, omega, c0_);
  if (!field_) return g0;
  return g0 * std::polar(1.0, omega * travel_time_perturbation(x, y));
}

}  // namespace holoimg
