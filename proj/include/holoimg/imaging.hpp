#pragma once

#include "holoimg/forward.hpp"
#include "holoimg/scene.hpp"
#include "holoimg/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holoimg {

/// Binary (N*S) x (N*S) matrix with Z_ij = 1 iff |x_s - x_s'| <= X_d and |w_l - w_l'| <= Omega_d,
/// where (s, l) and (s', l') are the source/frequency pairs of i and j. Stored in separable
/// form; indices are 0-based like matrix entries.
class Mask {
 public:
  Mask(std::vector<std::vector<std::size_t>> source_neighbors,
       std::vector<std::vector<std::size_t>> freq_neighbors, double x_d, double omega_d);

  std::size_t sources() const { return src_.size(); }
  std::size_t frequencies() const { return freq_.size(); }
  std::size_t size() const { return sources() * frequencies(); }
  double x_d() const { return x_d_; }
  double omega_d() const { return omega_d_; }

  bool at(std::size_t i, std::size_t j) const;
  /// Column indices j with Z_ij = 1, ascending.
  std::vector<std::size_t> row(std::size_t i) const;
  std::size_t nnz() const;
  RMatrix dense() const;

  const std::vector<std::size_t>& source_neighbors(std::size_t s) const { return src_.at(s); }
  const std::vector<std::size_t>& frequency_neighbors(std::size_t l) const { return freq_.at(l); }

 private:
  std::vector<std::vector<std::size_t>> src_;
  std::vector<std::vector<std::size_t>> freq_;
  std::vector<std::vector<char>> src_dense_;
  std::vector<std::vector<char>> freq_dense_;
  double x_d_;
  double omega_d_;
};

/// Thresholds are compared with a relative slack of 1e-9 so that spacings that are
/// exact multiples of the grid step are not lost to rounding.
Mask build_mask(const ArrayGeometry& geometry, const FrequencyGrid& freqs, double x_d,
                double omega_d);

/// K x (N*S) matrix with entry (k, s + l N) = G0(x_r, y_k; w_l) G0(x_s, y_k; w_l)
/// for the 1-based receiver r.
CMatrix model_matrix_g0r(const ArrayGeometry& geometry, const FrequencyGrid& freqs,
                         const ImageWindow& iw, std::size_t receiver,
                         double c0 = kReferenceSpeed);

struct ImageMap {
  ImageWindow window;
  RVector values;                ///< pixel k = ix * nz + iz
  std::string functional;        ///< "km", "interf", "srint", "cint", "music", "signal"
  bool nonnegative = true;       ///< whether the functional is nonnegative in exact arithmetic
  double imaginary_residue = 0;  ///< max |Im| / max |value| of the raw interferometric sum
  std::optional<double> x_d;
  std::optional<double> omega_d;
  std::optional<std::uint64_t> seed;

  ImageMap(ImageWindow w, RVector v, std::string name);
  double at(std::size_t ix, std::size_t iz) const { return values(static_cast<Eigen::Index>(window.index(ix, iz))); }
  std::size_t argmax() const;
};

/// Complex KM sum  sum_l g_r(y)^T conj(P(w_l)) g_s(y)  for every pixel.
CVector km_complex(const MultiFreqResponse& p, const ArrayGeometry& geometry,
                   const ImageWindow& iw, double c0 = kReferenceSpeed);
/// |KM|.
ImageMap image_km(const MultiFreqResponse& p, const ArrayGeometry& geometry,
                  const ImageWindow& iw, double c0 = kReferenceSpeed);

/// Single-receiver KM: G0r conj(p_r) for the receiver's row p_r of the response.
CVector km_single_receiver(const CVector& row, const CMatrix& g0r);

/// diag(G0r M G0r^*) by the dense triple product.
ImageMap image_interf(const CMatrix& mr, const CMatrix& g0r, const ImageWindow& iw);
/// Interf for M = v^* v (v = response row), evaluated as |G0r conj(v)|^2.
ImageMap image_interf_rank_one(const CVector& v, const CMatrix& g0r, const ImageWindow& iw);

/// diag(G0r (Z o M) G0r^*), visiting only mask nonzeros.
ImageMap image_srint(const CMatrix& mr, const Mask& mask, const CMatrix& g0r,
                     const ImageWindow& iw);
/// Same functional via an explicit dense Z o M; for validation.
ImageMap image_srint_dense(const CMatrix& mr, const Mask& mask, const CMatrix& g0r,
                           const ImageWindow& iw);

/// Coherent interferometry on full-phase data:
/// sum over |x_s - x_s'| <= X_d, |x_r - x_r'| <= X_d, |w_l - w_l'| <= Omega_d of
/// q(r, s, l) conj(q(r', s', l')) with q = conj(P_rs(w_l)) G0(x_r, y; w_l) G0(x_s, y; w_l).
/// With `receiver` set, only that (1-based) receiver is used on both sides.
ImageMap image_cint(const MultiFreqResponse& p, double x_d, double omega_d,
                    const ArrayGeometry& geometry, const ImageWindow& iw,
                    std::optional<std::size_t> receiver = std::nullopt,
                    double c0 = kReferenceSpeed);

struct SubspaceOptions {
  /// Pair steering vectors with eigenvectors through V^H g0 instead of g0^T V.
  bool conjugate_pairing = false;
};

/// Single-frequency interferometric matrices M(w_l) = P(w_l)^* P(w_l).
std::vector<CMatrix> interferometric_blocks(const MultiFreqResponse& p);
/// Diagonal blocks M(w_l) of a full (N*S) x (N*S) interferometric matrix.
std::vector<CMatrix> interferometric_blocks(const CMatrix& full_m, std::size_t n, std::size_t s);

/// Number of singular values of P (square roots of the eigenvalues of M) above
/// rel_threshold times the largest.
std::size_t estimate_signal_rank(const CMatrix& m, double rel_threshold = 1e-3);

/// MUSIC: min over the window of ||P_N g0|| divided by ||P_N g0(y)||, with unit-norm
/// steering vectors; multifrequency images are sums of single-frequency images.
/// m_per_freq[l] is M(w_l), indexed by source. Throws ValidationError when m_est >= N.
ImageMap music_image(const std::vector<CMatrix>& m_per_freq, const FrequencyGrid& freqs,
                     std::size_t m_est, const std::vector<Point2>& sources,
                     const ImageWindow& iw, const SubspaceOptions& opts = {},
                     double c0 = kReferenceSpeed);

/// SIGNAL: ||P_S g0(y)|| over its maximum on the window, same conventions as music_image.
ImageMap signal_image(const std::vector<CMatrix>& m_per_freq, const FrequencyGrid& freqs,
                      std::size_t m_est, const std::vector<Point2>& sources,
                      const ImageWindow& iw, const SubspaceOptions& opts = {},
                      double c0 = kReferenceSpeed);

/// Signal and noise components of a steering vector for orthonormal eigenvectors V
/// (columns are the signal subspace basis).
struct SubspaceSplit {
  CVector signal;
  CVector noise;
};
SubspaceSplit project_subspaces(const CVector& g0, const CMatrix& v, const SubspaceOptions& opts = {});

struct Peak {
  std::size_t index = 0;
  std::size_t ix = 0;
  std::size_t iz = 0;
  Point2 position = Point2::Zero();
  double value = 0.0;
};

/// Local maxima (8-neighbourhood) with value >= threshold_frac * max, sorted by value
/// (descending, ties by pixel index) and greedily kept when farther than min_separation
/// cells from every peak kept before.
std::vector<Peak> extract_peaks(const ImageMap& img, double threshold_frac,
                                double min_separation);

struct Resolution {
  double cross_range = 0.0;  ///< lambda0
  double range = 0.0;        ///< lambda0
  bool cross_range_clipped = false;
  bool range_clipped = false;
};

/// FWHM along both axes through pixel `peak`, linear interpolation between samples.
Resolution resolution_metrics(const ImageMap& img, std::size_t peak);

}  // namespace holoimg
