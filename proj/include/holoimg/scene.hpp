#pragma once

#include "holoimg/types.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace holoimg {

/// Composite index of (source s, frequency l), both 1-based: s + (l - 1) * n.
std::size_t linear_index(std::size_t s, std::size_t l, std::size_t n);

/// Inverse of linear_index; returns the 1-based pair (s, l).
std::pair<std::size_t, std::size_t> split_index(std::size_t i, std::size_t n);

/// Transducer layout. Sources and receivers share positions when colocated.
class ArrayGeometry {
 public:
  /// Colocated array.
  explicit ArrayGeometry(std::vector<Point2> positions);
  /// Separate source and receiver arrays.
  ArrayGeometry(std::vector<Point2> sources, std::vector<Point2> receivers);

  /// Linear array along cross-range with `count` elements spanning `aperture`.
  static ArrayGeometry equispaced(double aperture, std::size_t count,
                                  const Point2& center = Point2::Zero());

  /// Number of sources N.
  std::size_t size() const { return sources_.size(); }
  std::size_t receiver_count() const { return receivers_.size(); }
  const std::vector<Point2>& sources() const { return sources_; }
  const std::vector<Point2>& receivers() const { return receivers_; }
  bool colocated() const { return colocated_; }

  /// Largest cross-range extent between two sources.
  double aperture() const;
  /// Mean source position.
  Point2 center() const;

 private:
  std::vector<Point2> sources_;
  std::vector<Point2> receivers_;
  bool colocated_ = true;
};

/// Strictly increasing list of angular frequencies in units of the central
/// angular frequency (so omega = f / f0).
class FrequencyGrid {
 public:
  FrequencyGrid(std::vector<double> omegas, double f0_thz, double c0_m_per_s = 3.0e8);

  static FrequencyGrid equispaced_thz(double fmin_thz, double fmax_thz, std::size_t count,
                                      double f0_thz, double c0_m_per_s = 3.0e8);
  static FrequencyGrid from_thz(const std::vector<double>& freqs_thz, double f0_thz,
                                double c0_m_per_s = 3.0e8);

  std::size_t size() const { return omegas_.size(); }
  double omega(std::size_t l) const { return omegas_.at(l); }
  const std::vector<double>& omegas() const { return omegas_; }
  double frequency_thz(std::size_t l) const { return omegas_.at(l) * f0_thz_; }
  std::vector<double> frequencies_thz() const;

  double f0_thz() const { return f0_thz_; }
  double c0_m_per_s() const { return c0_; }
  /// Central wavelength in metres.
  double lambda0_m() const { return c0_ / (f0_thz_ * 1e12); }

  /// max - min, in units of the central frequency.
  double bandwidth() const { return omegas_.back() - omegas_.front(); }
  double bandwidth_thz() const { return bandwidth() * f0_thz_; }

 private:
  std::vector<double> omegas_;
  double f0_thz_;
  double c0_;
};

/// Rectangular imaging region sampled at cell centres.
///
/// Pixel k = ix * nz + iz (range index fastest), with centre
/// origin + ((ix + 1/2) * pitch_x, (iz + 1/2) * pitch_z).
class ImageWindow {
 public:
  ImageWindow(const Point2& origin, const Eigen::Vector2d& extent, const Eigen::Vector2d& pitch);

  static ImageWindow centered(const Point2& center, const Eigen::Vector2d& extent,
                              const Eigen::Vector2d& pitch);

  const Point2& origin() const { return origin_; }
  const Eigen::Vector2d& extent() const { return extent_; }
  const Eigen::Vector2d& pitch() const { return pitch_; }
  Point2 center() const { return origin_ + 0.5 * extent_; }

  std::size_t nx() const { return nx_; }
  std::size_t nz() const { return nz_; }
  std::size_t size() const { return nx_ * nz_; }

  std::size_t index(std::size_t ix, std::size_t iz) const;
  std::pair<std::size_t, std::size_t> coords(std::size_t k) const;
  Point2 point(std::size_t k) const;
  Point2 point(std::size_t ix, std::size_t iz) const;
  /// Pixel whose cell contains p (clamped to the window).
  std::size_t nearest_index(const Point2& p) const;
  bool contains(const Point2& p) const;

 private:
  Point2 origin_;
  Eigen::Vector2d extent_;
  Eigen::Vector2d pitch_;
  std::size_t nx_ = 0;
  std::size_t nz_ = 0;
};

/// All K pixel centres in window order.
std::vector<Point2> grid_points(const ImageWindow& iw);

struct Scatterer {
  Point2 position;
  Complex reflectivity;
};

/// Point scatterers with complex, frequency-independent reflectivities.
class Scene {
 public:
  explicit Scene(std::vector<Scatterer> scatterers);

  std::size_t size() const { return scatterers_.size(); }
  const std::vector<Scatterer>& scatterers() const { return scatterers_; }
  const Scatterer& operator[](std::size_t j) const { return scatterers_.at(j); }

 private:
  std::vector<Scatterer> scatterers_;
};

}  // namespace holoimg
