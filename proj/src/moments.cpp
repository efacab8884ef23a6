#include "holoimg/moments.hpp"

#include "holoimg/errors.hpp"
#include "holoimg/random_field.hpp"
#include "parallel.hpp"

#include <cmath>

namespace holoimg {

bool MomentReport::passes(double z_max) const {
  for (const auto& r : rows) {
    if (!(std::abs(r.z) <= z_max)) return false;
  }
  return !rows.empty();
}

namespace {

struct Stats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Stats sample_stats(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

MomentRow make_row(std::string name, double theory, const std::vector<double>& samples) {
  const Stats s = sample_stats(samples);
  MomentRow r;
  r.quantity = std::move(name);
  r.theory = theory;
  r.estimate = s.mean;
  r.stderr_ = s.stderr_;
  r.n = samples.size();
  r.z = s.stderr_ > 0.0 ? (s.mean - theory) / s.stderr_ : (s.mean == theory ? 0.0 : INFINITY);
  return r;
}

}  // namespace

MomentReport run_moments(const MomentConfig& cfg) {
  if (cfg.realizations < 100) {
    throw ValidationError("moment verification needs at least 100 realizations (got " +
                          std::to_string(cfg.realizations) + ")");
  }
  if (!(cfg.epsilon > 0.0) || !(cfg.corr_len > 0.0)) {
    throw ValidationError("epsilon and correlation length must be > 0");
  }
  const MomentProbe& p = cfg.probe;
  const double c0 = kReferenceSpeed;
  const double path = (p.x - p.y).norm();
  const double offset = (p.x - p.x_prime).norm();
  const double sigma = cfg.epsilon * characteristic_strength(cfg.corr_len, path);
  const double spacing = cfg.grid_spacing > 0.0 ? cfg.grid_spacing : 0.25 * cfg.corr_len;

  MomentReport report;
  report.sigma = sigma;
  report.epsilon = cfg.epsilon;
  report.tau_c = tau_c(sigma, cfg.corr_len, path, c0);
  const DecoherenceParams dp = decoherence_params(report.tau_c, cfg.corr_len);
  report.omega_d = dp.omega_d;
  report.x_d = dp.x_d;
  report.regime = validate_regime(sigma, cfg.corr_len, path);

  const auto spec = RandomFieldSpec::covering({p.x, p.x_prime, p.y}, cfg.corr_len, spacing,
                                              3.0 * cfg.corr_len);
  const GaussianFieldSampler sampler(spec);
  const std::size_t n = cfg.realizations;
  std::vector<double> nu_x(n);
  std::vector<double> nu_xp(n);
  detail::parallel_for(n, [&](std::size_t k) {
    const RandomField f = sampler.sample(realization_seed(cfg.seed, k));
    nu_x[k] = nu(p.x, p.y, f, sigma, cfg.corr_len, c0);
    nu_xp[k] = nu(p.x_prime, p.y, f, sigma, cfg.corr_len, c0);
  });

  const double t2 = report.tau_c * report.tau_c;
  const Complex g0 = green_homogeneous(p.x, p.y, p.omega, c0);
  const Complex g0p = green_homogeneous(p.x_prime, p.y, p.omega_prime, c0);
  const Complex g0g0 = g0 * std::conj(g0p);
  const double scale = std::norm(g0g0);

  std::vector<double> prod(n), exp_re(n), cross_re(n), green_re(n);
  std::vector<Complex> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    prod[k] = nu_x[k] * nu_xp[k];
    exp_re[k] = std::cos(p.omega * nu_x[k]);
    cross_re[k] = std::cos(p.omega * nu_x[k] - p.omega_prime * nu_xp[k]);
    const Complex g = g0 * std::polar(1.0, p.omega * nu_x[k]);
    const Complex gp = g0p * std::polar(1.0, p.omega_prime * nu_xp[k]);
    z[k] = g * std::conj(gp);
    green_re[k] = (z[k] / g0g0).real();
  }
  Complex zbar(0.0);
  for (const auto& v : z) zbar += v;
  zbar /= static_cast<double>(n);
  // Unbiased per-sample contributions to Var(Z) = E|Z - E Z|^2.
  std::vector<double> dev(n);
  const double bias = static_cast<double>(n) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) dev[k] = bias * std::norm(z[k] - zbar) / scale;

  RandomMediumParams mp{sigma, cfg.corr_len, c0};
  const GreenProductMoments gm =
      moment_green_product(p.x, p.x_prime, p.y, p.omega, p.omega_prime, mp);
  const double cross =
      moment_exp_cross(p.omega, p.omega_prime, offset, report.tau_c, cfg.corr_len);

  report.rows.push_back(make_row("mean_nu", 0.0, nu_x));
  report.rows.push_back(
      make_row("cov_nu", t2 * covariance_C(offset / cfg.corr_len), prod));
  report.rows.push_back(
      make_row("mean_exp_i_omega_nu", std::exp(-0.5 * p.omega * p.omega * t2), exp_re));
  report.rows.push_back(make_row("cross_moment", cross, cross_re));
  report.rows.push_back(make_row("green_product_mean", (gm.mean / g0g0).real(), green_re));
  report.rows.push_back(make_row("green_product_variance", gm.variance / scale, dev));
  report.rows.push_back(make_row("green_product_variance_exact", gm.variance_exact / scale, dev));
  return report;
}

}  // namespace holoimg
