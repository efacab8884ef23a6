#pragma once

#include "holoimg/medium.hpp"
#include "holoimg/scene.hpp"
#include "holoimg/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace holoimg {

/// Component r is G(x_r, y; omega) in the given medium.
CVector green_vector(const Point2& y, double omega, const std::vector<Point2>& positions,
                     const Medium& medium);

/// Distances and random travel-time perturbations between array elements and
/// scatterers, computed once per scene and reused for every frequency.
class PathTable {
 public:
  PathTable(const std::vector<Point2>& elements, const std::vector<Point2>& targets,
            const Medium& medium);

  std::size_t elements() const { return n_elem_; }
  std::size_t targets() const { return n_targ_; }
  double distance(std::size_t e, std::size_t t) const { return dist_[e * n_targ_ + t]; }
  double perturbation(std::size_t e, std::size_t t) const { return nu_[e * n_targ_ + t]; }

  /// elements x targets matrix of Green's functions at omega.
  CMatrix green(double omega) const;

 private:
  std::size_t n_elem_;
  std::size_t n_targ_;
  double c0_;
  std::vector<double> dist_;
  std::vector<double> nu_;
};

/// Block row [P(w_1) ... P(w_S)]: receivers x (sources * S), column s + l*N for frequency l.
class MultiFreqResponse {
 public:
  MultiFreqResponse(CMatrix data, std::size_t sources, FrequencyGrid freqs);

  const CMatrix& matrix() const { return data_; }
  std::size_t receivers() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t sources() const { return n_; }
  std::size_t frequencies() const { return freqs_.size(); }
  const FrequencyGrid& grid() const { return freqs_; }

  /// P(w_l) for 0-based l.
  CMatrix block(std::size_t l) const;
  /// Row r as a composite vector of length N*S (the data seen by one receiver).
  CVector row(std::size_t r) const { return data_.row(static_cast<Eigen::Index>(r)).transpose(); }

 private:
  CMatrix data_;
  std::size_t n_;
  FrequencyGrid freqs_;
};

/// P(w) = sum_j alpha_j g_r(y_j) g_s(y_j)^T.
CMatrix response_single(const Scene& scene, const ArrayGeometry& geometry, const Medium& medium,
                        double omega);

MultiFreqResponse response_multi(const Scene& scene, const ArrayGeometry& geometry,
                                 const Medium& medium, const FrequencyGrid& freqs);

/// b = P f.
CVector apply_illumination(const MultiFreqResponse& p, const CVector& f);

/// Componentwise |b_i|^2.
RVector intensities(const CVector& b);

/// Adds circular complex Gaussian noise to b with power mean(|b|^2) / 10^(snr_db / 10).
CVector add_noise(const CVector& b, double snr_db, std::uint64_t seed);

/// Homogeneous model operator for one frequency, receivers x K:
/// entry (r, k) = G0(x_r, y_k) * sum_s G0(y_k, x_s) f_s.
CMatrix model_operator_A0(const CVector& f, double omega, const ArrayGeometry& geometry,
                          const ImageWindow& iw, double c0 = kReferenceSpeed);

/// rho_KM = A0^* b.
CVector km_linear_estimate(const CMatrix& a0, const CVector& b);

}  // namespace holoimg
