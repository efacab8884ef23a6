#include "holoimg/random_field.hpp"

#include "holoimg/errors.hpp"
#include "rng.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <random>

namespace holoimg {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void RandomFieldSpec::validate() const {
  if (!(corr_len > 0.0)) throw ValidationError("field correlation length must be > 0");
  if (!(spacing > 0.0)) throw ValidationError("field grid spacing must be > 0");
  if (spacing > 0.25 * corr_len * (1.0 + 1e-12)) {
    throw ValidationError("field grid spacing must not exceed corr_len / 4");
  }
  if (nx < 2 || nz < 2) throw ValidationError("field grid needs at least 2x2 nodes");
  if (!origin.allFinite()) throw ValidationError("field grid origin must be finite");
}

Point2 RandomFieldSpec::far_corner() const {
  return origin + spacing * Point2(static_cast<double>(nx - 1), static_cast<double>(nz - 1));
}

RandomFieldSpec RandomFieldSpec::covering(const std::vector<Point2>& points, double corr_len,
                                          double spacing, double margin) {
  if (points.empty()) throw ValidationError("cannot cover an empty point set");
  Point2 lo = points.front();
  Point2 hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  RandomFieldSpec spec;
  spec.corr_len = corr_len;
  spec.spacing = spacing;
  spec.origin = lo - Point2(margin, margin);
  const Point2 span = (hi - lo) + Point2(2.0 * margin, 2.0 * margin);
  spec.nx = static_cast<std::size_t>(std::ceil(span.x() / spacing)) + 1;
  spec.nz = static_cast<std::size_t>(std::ceil(span.y() / spacing)) + 1;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------

RandomField::RandomField(RandomFieldSpec spec, std::vector<double> samples, std::uint64_t seed)
    : spec_(spec), samples_(std::move(samples)), seed_(seed) {
  spec_.validate();
  if (samples_.size() != spec_.nx * spec_.nz) {
    throw ValidationError("field sample count does not match the grid");
  }
}

bool RandomField::covers(const Point2& p) const {
  const Point2 hi = spec_.far_corner();
  const double tol = 1e-9 * spec_.spacing;
  return p.x() >= spec_.origin.x() - tol && p.y() >= spec_.origin.y() - tol &&
         p.x() <= hi.x() + tol && p.y() <= hi.y() + tol;
}

double RandomField::value(const Point2& p) const {
  if (!covers(p)) throw DomainError("point lies outside the random field grid");
  const double u = (p.x() - spec_.origin.x()) / spec_.spacing;
  const double v = (p.y() - spec_.origin.y()) / spec_.spacing;
  const auto ix = static_cast<std::size_t>(
      std::clamp(std::floor(u), 0.0, static_cast<double>(spec_.nx - 2)));
  const auto iz = static_cast<std::size_t>(
      std::clamp(std::floor(v), 0.0, static_cast<double>(spec_.nz - 2)));
  const double fx = std::clamp(u - static_cast<double>(ix), 0.0, 1.0);
  const double fz = std::clamp(v - static_cast<double>(iz), 0.0, 1.0);
  const double a = at(ix, iz);
  const double b = at(ix + 1, iz);
  const double c = at(ix, iz + 1);
  const double d = at(ix + 1, iz + 1);
  return (1.0 - fx) * ((1.0 - fz) * a + fz * c) + fx * ((1.0 - fz) * b + fz * d);
}

// ---------------------------------------------------------------------------

struct GaussianFieldSampler::Impl {
  RandomFieldSpec spec;
  int n0 = 0;  // padded cross-range nodes
  int n1 = 0;  // padded range nodes
  std::vector<double> sqrt_eigen;  // n0 * (n1 / 2 + 1)
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

GaussianFieldSampler::GaussianFieldSampler(RandomFieldSpec spec) : impl_(std::make_unique<Impl>()) {
  spec.validate();
  impl_->spec = spec;
  const auto pad = static_cast<std::size_t>(std::ceil(6.0 * spec.corr_len / spec.spacing));
  impl_->n0 = static_cast<int>(spec.nx + pad);
  impl_->n1 = static_cast<int>(spec.nz + pad);
  const int n0 = impl_->n0;
  const int n1 = impl_->n1;
  const int nc = n1 / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(n0) * n1;
  const std::size_t ncomplex = static_cast<std::size_t>(n0) * nc;

  std::vector<double> real(nreal);
  std::vector<std::complex<double>> spectrum(ncomplex);
  {
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    impl_->forward = fftw_plan_dft_r2c_2d(n0, n1, real.data(),
                                          reinterpret_cast<fftw_complex*>(spectrum.data()), flags);
    impl_->backward = fftw_plan_dft_c2r_2d(n0, n1, reinterpret_cast<fftw_complex*>(spectrum.data()),
                                           real.data(), flags);
  }
  if (!impl_->forward || !impl_->backward) throw Error("FFTW planning failed");

  // First row of the circulant covariance: Gaussian kernel at periodic lags.
  const double h_over_l = spec.spacing / spec.corr_len;
  for (int a = 0; a < n0; ++a) {
    const double da = std::min(a, n0 - a) * h_over_l;
    for (int b = 0; b < n1; ++b) {
      const double db = std::min(b, n1 - b) * h_over_l;
      real[static_cast<std::size_t>(a) * n1 + b] = std::exp(-0.5 * (da * da + db * db));
    }
  }
  fftw_execute_dft_r2c(impl_->forward, real.data(),
                       reinterpret_cast<fftw_complex*>(spectrum.data()));
  impl_->sqrt_eigen.resize(ncomplex);
  for (std::size_t k = 0; k < ncomplex; ++k) {
    impl_->sqrt_eigen[k] = std::sqrt(std::max(spectrum[k].real(), 0.0));
  }
}

GaussianFieldSampler::~GaussianFieldSampler() = default;
GaussianFieldSampler::GaussianFieldSampler(GaussianFieldSampler&&) noexcept = default;
GaussianFieldSampler& GaussianFieldSampler::operator=(GaussianFieldSampler&&) noexcept = default;

const RandomFieldSpec& GaussianFieldSampler::spec() const { return impl_->spec; }

RandomField GaussianFieldSampler::sample(std::uint64_t seed) const {
  const int n0 = impl_->n0;
  const int n1 = impl_->n1;
  const int nc = n1 / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(n0) * n1;

  std::mt19937_64 rng(detail::splitmix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> real(nreal);
  for (auto& w : real) w = normal(rng);

  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(n0) * nc);
  fftw_execute_dft_r2c(impl_->forward, real.data(),
                       reinterpret_cast<fftw_complex*>(spectrum.data()));
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= impl_->sqrt_eigen[k];
  fftw_execute_dft_c2r(impl_->backward, reinterpret_cast<fftw_complex*>(spectrum.data()),
                       real.data());

  const auto& spec = impl_->spec;
  const double scale = 1.0 / static_cast<double>(nreal);
  std::vector<double> samples(spec.nx * spec.nz);
  for (std::size_t ix = 0; ix < spec.nx; ++ix) {
    for (std::size_t iz = 0; iz < spec.nz; ++iz) {
      samples[ix * spec.nz + iz] = real[ix * static_cast<std::size_t>(n1) + iz] * scale;
    }
  }
  return RandomField(spec, std::move(samples), seed);
}

RandomField sample_mu_field(const RandomFieldSpec& spec, std::uint64_t seed) {
  return GaussianFieldSampler(spec).sample(seed);
}

}  // namespace holoimg
