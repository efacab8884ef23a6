#pragma once

#include "holoimg/types.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace holoimg {

/// Regular grid on which the fluctuation field is sampled.
///
/// Node (ix, iz) sits at origin + spacing * (ix, iz); samples are stored range-fastest,
/// i.e. at ix * nz + iz, matching ImageWindow.
struct RandomFieldSpec {
  Point2 origin = Point2::Zero();
  std::size_t nx = 0;
  std::size_t nz = 0;
  double spacing = 0.0;
  double corr_len = 0.0;

  /// Throws ValidationError when the grid is too coarse (spacing > corr_len / 4) or degenerate.
  void validate() const;
  Point2 far_corner() const;

  /// Smallest grid with the given spacing that covers the bounding box of `points`
  /// plus `margin` on every side.
  static RandomFieldSpec covering(const std::vector<Point2>& points, double corr_len,
                                  double spacing, double margin);
};

/// One sampled realization of the zero-mean, unit-variance field mu with
/// autocorrelation exp(-r^2 / (2 l^2)).
class RandomField {
 public:
  RandomField(RandomFieldSpec spec, std::vector<double> samples, std::uint64_t seed);

  const RandomFieldSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& samples() const { return samples_; }

  double at(std::size_t ix, std::size_t iz) const { return samples_[ix * spec_.nz + iz]; }
  bool covers(const Point2& p) const;
  /// Bilinear interpolation; throws DomainError outside the grid.
  double value(const Point2& p) const;

 private:
  RandomFieldSpec spec_;
  std::vector<double> samples_;
  std::uint64_t seed_;
};

/// Spectral (circulant-embedding) synthesis of Gaussian fields for a fixed grid.
///
/// The grid is embedded in a periodic domain padded by at least six correlation
/// lengths per axis; the discrete covariance on that domain is exactly the sampled
/// Gaussian kernel. Planning happens once, so reuse one sampler for Monte Carlo loops.
/// sample() is safe to call concurrently.
class GaussianFieldSampler {
 public:
  explicit GaussianFieldSampler(RandomFieldSpec spec);
  ~GaussianFieldSampler();
  GaussianFieldSampler(GaussianFieldSampler&&) noexcept;
  GaussianFieldSampler& operator=(GaussianFieldSampler&&) noexcept;

  const RandomFieldSpec& spec() const;
  RandomField sample(std::uint64_t seed) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RandomField sample_mu_field(const RandomFieldSpec& spec, std::uint64_t seed);

/// Seed of realization `index`: the scrambled base seed XOR the index. Scrambling keeps
/// nearby base seeds from producing the same set of realizations.
inline std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return (x ^ (x >> 31)) ^ index;
}

}  // namespace holoimg
