#include "holoimg/imaging.hpp"

#include "holoimg/errors.hpp"
#include "holoimg/medium.hpp"
#include "parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace holoimg {

namespace {

constexpr double kThresholdSlack = 1e-9;

bool within(double d, double threshold) {
  return d <= threshold * (1.0 + kThresholdSlack) + 1e-12;
}

std::vector<std::vector<std::size_t>> neighbor_lists(const std::vector<Point2>& pts,
                                                     double threshold) {
  std::vector<std::vector<std::size_t>> out(pts.size());
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = 0; b < pts.size(); ++b) {
      if (within((pts[a] - pts[b]).norm(), threshold)) out[a].push_back(b);
    }
  }
  return out;
}

std::vector<std::vector<char>> to_dense(const std::vector<std::vector<std::size_t>>& lists) {
  std::vector<std::vector<char>> d(lists.size(), std::vector<char>(lists.size(), 0));
  for (std::size_t a = 0; a < lists.size(); ++a) {
    for (std::size_t b : lists[a]) d[a][b] = 1;
  }
  return d;
}

void require_square(const CMatrix& m, Eigen::Index ns, const char* what) {
  if (m.rows() != ns || m.cols() != ns) {
    throw ValidationError(std::string(what) + " must be " + std::to_string(ns) + " x " +
                          std::to_string(ns) + " to match the model matrix");
  }
}

ImageMap real_image(const CVector& raw, const ImageWindow& iw, const std::string& name) {
  ImageMap img(iw, raw.real(), name);
  const double vmax = raw.real().cwiseAbs().maxCoeff();
  const double imax = raw.imag().cwiseAbs().maxCoeff();
  img.imaginary_residue = vmax > 0.0 ? imax / vmax : imax;
  return img;
}

}  // namespace

// ---------------------------------------------------------------------------

Mask::Mask(std::vector<std::vector<std::size_t>> source_neighbors,
           std::vector<std::vector<std::size_t>> freq_neighbors, double x_d, double omega_d)
    : src_(std::move(source_neighbors)),
      freq_(std::move(freq_neighbors)),
      src_dense_(to_dense(src_)),
      freq_dense_(to_dense(freq_)),
      x_d_(x_d),
      omega_d_(omega_d) {}

bool Mask::at(std::size_t i, std::size_t j) const {
  const std::size_t n = sources();
  if (i >= size() || j >= size()) throw IndexError("mask index outside 0..N*S-1");
  return src_dense_[i % n][j % n] && freq_dense_[i / n][j / n];
}

std::vector<std::size_t> Mask::row(std::size_t i) const {
  const std::size_t n = sources();
  if (i >= size()) throw IndexError("mask row outside 0..N*S-1");
  std::vector<std::size_t> out;
  out.reserve(src_[i % n].size() * freq_[i / n].size());
  for (std::size_t lp : freq_[i / n]) {
    for (std::size_t sp : src_[i % n]) out.push_back(sp + lp * n);
  }
  return out;
}

std::size_t Mask::nnz() const {
  std::size_t a = 0;
  std::size_t b = 0;
  for (const auto& r : src_) a += r.size();
  for (const auto& r : freq_) b += r.size();
  return a * b;
}

RMatrix Mask::dense() const {
  const auto ns = static_cast<Eigen::Index>(size());
  RMatrix z = RMatrix::Zero(ns, ns);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j : row(i)) z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return z;
}

Mask build_mask(const ArrayGeometry& geometry, const FrequencyGrid& freqs, double x_d,
                double omega_d) {
  if (!(x_d >= 0.0) || !(omega_d >= 0.0)) {
    throw ValidationError("mask thresholds must be >= 0");
  }
  std::vector<std::vector<std::size_t>> fl(freqs.size());
  for (std::size_t l = 0; l < freqs.size(); ++l) {
    for (std::size_t lp = 0; lp < freqs.size(); ++lp) {
      if (within(std::abs(freqs.omega(l) - freqs.omega(lp)), omega_d)) fl[l].push_back(lp);
    }
  }
  return Mask(neighbor_lists(geometry.sources(), x_d), std::move(fl), x_d, omega_d);
}

CMatrix model_matrix_g0r(const ArrayGeometry& geometry, const FrequencyGrid& freqs,
                         const ImageWindow& iw, std::size_t receiver, double c0) {
  if (receiver < 1 || receiver > geometry.receiver_count()) {
    throw IndexError("receiver " + std::to_string(receiver) + " outside 1.." +
                     std::to_string(geometry.receiver_count()));
  }
  const auto pts = grid_points(iw);
  const auto k = static_cast<Eigen::Index>(pts.size());
  const auto n = static_cast<Eigen::Index>(geometry.size());
  const PathTable src(geometry.sources(), pts, Medium::homogeneous(c0));
  const PathTable rcv({geometry.receivers()[receiver - 1]}, pts, Medium::homogeneous(c0));
  CMatrix g(k, n * static_cast<Eigen::Index>(freqs.size()));
  detail::parallel_for(freqs.size(), [&](std::size_t l) {
    const double w = freqs.omega(l);
    const CMatrix gs = src.green(w);            // N x K
    const CVector gr = rcv.green(w).row(0).transpose();  // K
    g.middleCols(static_cast<Eigen::Index>(l) * n, n) = gr.asDiagonal() * gs.transpose();
  });
  return g;
}

// ---------------------------------------------------------------------------

ImageMap::ImageMap(ImageWindow w, RVector v, std::string name)
    : window(std::move(w)), values(std::move(v)), functional(std::move(name)) {
  if (static_cast<std::size_t>(values.size()) != window.size()) {
    throw ValidationError("image has " + std::to_string(values.size()) + " values for " +
                          std::to_string(window.size()) + " pixels");
  }
}

std::size_t ImageMap::argmax() const {
  if (values.size() == 0) throw ValidationError("empty image");
  Eigen::Index k = 0;
  values.maxCoeff(&k);
  return static_cast<std::size_t>(k);
}

CVector km_complex(const MultiFreqResponse& p, const ArrayGeometry& geometry,
                   const ImageWindow& iw, double c0) {
  if (p.receivers() != geometry.receiver_count() || p.sources() != geometry.size()) {
    throw ValidationError("response dimensions do not match the array geometry");
  }
  const auto pts = grid_points(iw);
  const Medium ref = Medium::homogeneous(c0);
  const PathTable rcv(geometry.receivers(), pts, ref);
  std::optional<PathTable> src;
  if (!geometry.colocated()) src.emplace(geometry.sources(), pts, ref);
  const std::size_t s = p.frequencies();
  std::vector<CVector> partial(s);
  detail::parallel_for(s, [&](std::size_t l) {
    const double w = p.grid().omega(l);
    const CMatrix gr = rcv.green(w).transpose();  // K x Nr
    const CMatrix gs = src ? CMatrix(src->green(w).transpose()) : gr;
    const CMatrix t = gr * p.block(l).conjugate();
    partial[l] = t.cwiseProduct(gs).rowwise().sum();
  });
  CVector km = CVector::Zero(static_cast<Eigen::Index>(pts.size()));
  for (const auto& v : partial) km += v;
  return km;
}

ImageMap image_km(const MultiFreqResponse& p, const ArrayGeometry& geometry,
                  const ImageWindow& iw, double c0) {
  return ImageMap(iw, km_complex(p, geometry, iw, c0).cwiseAbs(), "km");
}

CVector km_single_receiver(const CVector& row, const CMatrix& g0r) {
  if (row.size() != g0r.cols()) throw ValidationError("response row does not match model matrix");
  return g0r * row.conjugate();
}

ImageMap image_interf(const CMatrix& mr, const CMatrix& g0r, const ImageWindow& iw) {
  require_square(mr, g0r.cols(), "interferometric matrix");
  if (static_cast<std::size_t>(g0r.rows()) != iw.size()) {
    throw ValidationError("model matrix rows do not match the image window");
  }
  const CMatrix t = g0r * mr;
  const CVector raw = t.cwiseProduct(g0r.conjugate()).rowwise().sum();
  return real_image(raw, iw, "interf");
}

ImageMap image_interf_rank_one(const CVector& v, const CMatrix& g0r, const ImageWindow& iw) {
  if (static_cast<std::size_t>(g0r.rows()) != iw.size()) {
    throw ValidationError("model matrix rows do not match the image window");
  }
  return ImageMap(iw, km_single_receiver(v, g0r).cwiseAbs2(), "interf");
}

ImageMap image_srint(const CMatrix& mr, const Mask& mask, const CMatrix& g0r,
                     const ImageWindow& iw) {
  require_square(mr, g0r.cols(), "interferometric matrix");
  if (static_cast<Eigen::Index>(mask.size()) != mr.rows()) {
    throw ValidationError("mask size does not match the interferometric matrix");
  }
  if (static_cast<std::size_t>(g0r.rows()) != iw.size()) {
    throw ValidationError("model matrix rows do not match the image window");
  }
  const std::size_t ns = mask.size();
  // Dense masks are cheaper through one matrix product than pair by pair.
  if (4 * mask.nnz() > ns * ns) return image_srint_dense(mr, mask, g0r, iw);
  std::vector<std::vector<std::size_t>> rows(ns);
  for (std::size_t i = 0; i < ns; ++i) rows[i] = mask.row(i);

  const Eigen::Index k = g0r.rows();
  constexpr Eigen::Index chunk = 256;
  const auto chunks = static_cast<std::size_t>((k + chunk - 1) / chunk);
  CVector raw = CVector::Zero(k);
  detail::parallel_for(chunks, [&](std::size_t c) {
    const Eigen::Index k0 = static_cast<Eigen::Index>(c) * chunk;
    const Eigen::Index len = std::min(chunk, k - k0);
    CVector acc(len);
    CVector out = CVector::Zero(len);
    for (std::size_t i = 0; i < ns; ++i) {
      acc.setZero();
      for (std::size_t j : rows[i]) {
        acc.noalias() += mr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                         g0r.col(static_cast<Eigen::Index>(j)).segment(k0, len).conjugate();
      }
      out += g0r.col(static_cast<Eigen::Index>(i)).segment(k0, len).cwiseProduct(acc);
    }
    raw.segment(k0, len) = out;
  });
  ImageMap img = real_image(raw, iw, "srint");
  img.nonnegative = false;
  img.x_d = mask.x_d();
  img.omega_d = mask.omega_d();
  return img;
}

ImageMap image_srint_dense(const CMatrix& mr, const Mask& mask, const CMatrix& g0r,
                           const ImageWindow& iw) {
  require_square(mr, g0r.cols(), "interferometric matrix");
  if (static_cast<Eigen::Index>(mask.size()) != mr.rows()) {
    throw ValidationError("mask size does not match the interferometric matrix");
  }
  const CMatrix zm = mr.cwiseProduct(mask.dense().cast<Complex>());
  ImageMap img = image_interf(zm, g0r, iw);
  img.functional = "srint";
  img.nonnegative = false;
  img.x_d = mask.x_d();
  img.omega_d = mask.omega_d();
  return img;
}

ImageMap image_cint(const MultiFreqResponse& p, double x_d, double omega_d,
                    const ArrayGeometry& geometry, const ImageWindow& iw,
                    std::optional<std::size_t> receiver, double c0) {
  if (p.receivers() != geometry.receiver_count() || p.sources() != geometry.size()) {
    throw ValidationError("response dimensions do not match the array geometry");
  }
  if (!(x_d >= 0.0) || !(omega_d >= 0.0)) throw ValidationError("CINT thresholds must be >= 0");
  const Mask mask = build_mask(geometry, p.grid(), x_d, omega_d);
  std::vector<std::size_t> rx;
  if (receiver) {
    if (*receiver < 1 || *receiver > geometry.receiver_count()) {
      throw IndexError("receiver outside 1..N");
    }
    rx.push_back(*receiver - 1);
  } else {
    rx.resize(geometry.receiver_count());
    std::iota(rx.begin(), rx.end(), 0);
  }
  std::vector<Point2> rx_pos;
  for (std::size_t r : rx) rx_pos.push_back(geometry.receivers()[r]);
  const auto rx_nb = neighbor_lists(rx_pos, x_d);

  const std::size_t nr = rx.size();
  const std::size_t n = geometry.size();
  const std::size_t s = p.frequencies();
  const auto pts = grid_points(iw);
  const Medium ref = Medium::homogeneous(c0);
  const PathTable rcv(rx_pos, pts, ref);
  const PathTable src(geometry.sources(), pts, ref);
  const CMatrix& pm = p.matrix();

  CVector raw(static_cast<Eigen::Index>(pts.size()));
  detail::parallel_for(pts.size(), [&](std::size_t k) {
    // q[(l * nr + r) * n + s]
    std::vector<Complex> q(s * nr * n);
    std::vector<Complex> gr(nr);
    std::vector<Complex> gs(n);
    for (std::size_t l = 0; l < s; ++l) {
      const double w = p.grid().omega(l);
      for (std::size_t r = 0; r < nr; ++r) {
        const double d = rcv.distance(r, k);
        gr[r] = std::polar(1.0 / (4.0 * kPi * d), w * d / c0);
      }
      for (std::size_t e = 0; e < n; ++e) {
        const double d = src.distance(e, k);
        gs[e] = std::polar(1.0 / (4.0 * kPi * d), w * d / c0);
      }
      for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t e = 0; e < n; ++e) {
          const Complex prs = pm(static_cast<Eigen::Index>(rx[r]),
                                 static_cast<Eigen::Index>(e + l * n));
          q[(l * nr + r) * n + e] = std::conj(prs) * gr[r] * gs[e];
        }
      }
    }
    // Apply the separable neighbourhood filters to conj(q), one axis at a time.
    std::vector<Complex> a(q.size());
    std::vector<Complex> b(q.size(), Complex(0.0));
    for (std::size_t i = 0; i < q.size(); ++i) a[i] = std::conj(q[i]);
    for (std::size_t l = 0; l < s; ++l) {
      for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t e = 0; e < n; ++e) {
          Complex acc(0.0);
          for (std::size_t ep : mask.source_neighbors(e)) acc += a[(l * nr + r) * n + ep];
          b[(l * nr + r) * n + e] = acc;
        }
      }
    }
    for (std::size_t l = 0; l < s; ++l) {
      for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t e = 0; e < n; ++e) {
          Complex acc(0.0);
          for (std::size_t rp : rx_nb[r]) acc += b[(l * nr + rp) * n + e];
          a[(l * nr + r) * n + e] = acc;
        }
      }
    }
    Complex total(0.0);
    for (std::size_t l = 0; l < s; ++l) {
      for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t e = 0; e < n; ++e) {
          Complex acc(0.0);
          for (std::size_t lp : mask.frequency_neighbors(l)) acc += a[(lp * nr + r) * n + e];
          total += q[(l * nr + r) * n + e] * acc;
        }
      }
    }
    raw(static_cast<Eigen::Index>(k)) = total;
  });
  ImageMap img = real_image(raw, iw, "cint");
  img.nonnegative = false;
  img.x_d = x_d;
  img.omega_d = omega_d;
  return img;
}

// ---------------------------------------------------------------------------

std::vector<CMatrix> interferometric_blocks(const MultiFreqResponse& p) {
  std::vector<CMatrix> out;
  out.reserve(p.frequencies());
  for (std::size_t l = 0; l < p.frequencies(); ++l) {
    const CMatrix b = p.block(l);
    out.push_back(b.adjoint() * b);
  }
  return out;
}

std::vector<CMatrix> interferometric_blocks(const CMatrix& full_m, std::size_t n, std::size_t s) {
  const auto ns = static_cast<Eigen::Index>(n * s);
  if (full_m.rows() != ns || full_m.cols() != ns) {
    throw ValidationError("interferometric matrix must be (N*S) x (N*S)");
  }
  std::vector<CMatrix> out;
  const auto nn = static_cast<Eigen::Index>(n);
  for (std::size_t l = 0; l < s; ++l) {
    const auto o = static_cast<Eigen::Index>(l) * nn;
    out.push_back(full_m.block(o, o, nn, nn));
  }
  return out;
}

std::size_t estimate_signal_rank(const CMatrix& m, double rel_threshold) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  const RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double top = ev.maxCoeff();
  if (!(top > 0.0)) return 0;
  return static_cast<std::size_t>((ev.array() > rel_threshold * top).count());
}

SubspaceSplit project_subspaces(const CVector& g0, const CMatrix& v, const SubspaceOptions& opts) {
  if (v.rows() != g0.size()) throw ValidationError("eigenvector length does not match g0");
  SubspaceSplit out;
  if (opts.conjugate_pairing) {
    out.signal = v * (v.adjoint() * g0);
  } else {
    // Coefficients g0^T V_j; conj(V_j) is the orthonormal basis they pair with.
    out.signal = v.conjugate() * (v.transpose() * g0);
  }
  out.noise = g0 - out.signal;
  return out;
}

namespace {

enum class Subspace { noise, signal };

ImageMap subspace_image(const std::vector<CMatrix>& m_per_freq, const FrequencyGrid& freqs,
                        std::size_t m_est, const std::vector<Point2>& sources,
                        const ImageWindow& iw, const SubspaceOptions& opts, double c0,
                        Subspace which) {
  const std::size_t n = sources.size();
  if (m_per_freq.size() != freqs.size()) {
    throw ValidationError("need one interferometric matrix per frequency");
  }
  if (m_est >= n) {
    throw ValidationError("signal rank " + std::to_string(m_est) +
                          " must be smaller than the number of sources " + std::to_string(n));
  }
  for (const auto& m : m_per_freq) {
    if (m.rows() != static_cast<Eigen::Index>(n) || m.cols() != static_cast<Eigen::Index>(n)) {
      throw ValidationError("single-frequency interferometric matrices must be N x N");
    }
  }
  const auto pts = grid_points(iw);
  const PathTable paths(sources, pts, Medium::homogeneous(c0));
  const auto kk = static_cast<Eigen::Index>(pts.size());
  RVector total = RVector::Zero(kk);
  constexpr double kFloor = 1e-15;

  for (std::size_t l = 0; l < freqs.size(); ++l) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_per_freq[l]);
    if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
    // Eigenvalues ascend; the signal subspace is spanned by the last m_est vectors.
    const CMatrix v = es.eigenvectors().rightCols(static_cast<Eigen::Index>(m_est));
    const CMatrix g = paths.green(freqs.omega(l));  // N x K
    RVector norms(kk);
    detail::parallel_for(pts.size(), [&](std::size_t k) {
      const auto kc = static_cast<Eigen::Index>(k);
      const CVector g0 = g.col(kc).normalized();
      const SubspaceSplit split = project_subspaces(g0, v, opts);
      norms(kc) = which == Subspace::noise ? split.noise.norm() : split.signal.norm();
    });
    if (which == Subspace::noise) {
      const double nmin = std::max(norms.minCoeff(), kFloor);
      total += (nmin / norms.array().max(kFloor)).matrix();
    } else {
      const double nmax = norms.maxCoeff();
      if (nmax > 0.0) total += norms / nmax;
    }
  }
  total /= static_cast<double>(freqs.size());
  return ImageMap(iw, std::move(total), which == Subspace::noise ? "music" : "signal");
}

}  // namespace

ImageMap music_image(const std::vector<CMatrix>& m_per_freq, const FrequencyGrid& freqs,
                     std::size_t m_est, const std::vector<Point2>& sources,
                     const ImageWindow& iw, const SubspaceOptions& opts, double c0) {
  return subspace_image(m_per_freq, freqs, m_est, sources, iw, opts, c0, Subspace::noise);
}

ImageMap signal_image(const std::vector<CMatrix>& m_per_freq, const FrequencyGrid& freqs,
                      std::size_t m_est, const std::vector<Point2>& sources,
                      const ImageWindow& iw, const SubspaceOptions& opts, double c0) {
  return subspace_image(m_per_freq, freqs, m_est, sources, iw, opts, c0, Subspace::signal);
}

// ---------------------------------------------------------------------------

std::vector<Peak> extract_peaks(const ImageMap& img, double threshold_frac,
                                double min_separation) {
  if (!(threshold_frac > 0.0) || threshold_frac > 1.0) {
    throw ValidationError("peak threshold fraction must be in (0, 1]");
  }
  const auto& iw = img.window;
  if (img.values.size() == 0) return {};
  const double vmax = img.values.maxCoeff();
  const double thr = threshold_frac * vmax;
  const auto nx = static_cast<std::ptrdiff_t>(iw.nx());
  const auto nz = static_cast<std::ptrdiff_t>(iw.nz());

  std::vector<Peak> cands;
  for (std::ptrdiff_t ix = 0; ix < nx; ++ix) {
    for (std::ptrdiff_t iz = 0; iz < nz; ++iz) {
      const double v = img.values(ix * nz + iz);
      if (v < thr) continue;
      bool is_max = true;
      for (std::ptrdiff_t dx = -1; dx <= 1 && is_max; ++dx) {
        for (std::ptrdiff_t dz = -1; dz <= 1; ++dz) {
          const std::ptrdiff_t jx = ix + dx;
          const std::ptrdiff_t jz = iz + dz;
          if ((dx == 0 && dz == 0) || jx < 0 || jz < 0 || jx >= nx || jz >= nz) continue;
          if (img.values(jx * nz + jz) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      Peak p;
      p.ix = static_cast<std::size_t>(ix);
      p.iz = static_cast<std::size_t>(iz);
      p.index = static_cast<std::size_t>(ix * nz + iz);
      p.position = iw.point(p.ix, p.iz);
      p.value = v;
      cands.push_back(p);
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.index < b.index;
  });
  std::vector<Peak> kept;
  for (const auto& c : cands) {
    const bool far = std::all_of(kept.begin(), kept.end(), [&](const Peak& k) {
      const double dx = static_cast<double>(c.ix) - static_cast<double>(k.ix);
      const double dz = static_cast<double>(c.iz) - static_cast<double>(k.iz);
      return std::hypot(dx, dz) > min_separation;
    });
    if (far) kept.push_back(c);
  }
  return kept;
}

namespace {

// Half-maximum crossing distance (in samples) from index `c` walking by `step`.
double half_width(const std::function<double(std::ptrdiff_t)>& f, std::ptrdiff_t c,
                  std::ptrdiff_t count, int step, double half, bool& clipped) {
  std::ptrdiff_t i = c;
  while (true) {
    const std::ptrdiff_t next = i + step;
    if (next < 0 || next >= count) {
      clipped = true;
      return static_cast<double>(std::abs(i - c));
    }
    const double vi = f(i);
    const double vn = f(next);
    if (vn < half) {
      const double frac = (vi - half) / (vi - vn);
      return static_cast<double>(std::abs(i - c)) + frac;
    }
    i = next;
  }
}

}  // namespace

Resolution resolution_metrics(const ImageMap& img, std::size_t peak) {
  const auto& iw = img.window;
  const auto [px, pz] = iw.coords(peak);
  const double top = img.values(static_cast<Eigen::Index>(peak));
  const double half = 0.5 * top;
  const auto nx = static_cast<std::ptrdiff_t>(iw.nx());
  const auto nz = static_cast<std::ptrdiff_t>(iw.nz());
  const auto cx = static_cast<std::ptrdiff_t>(px);
  const auto cz = static_cast<std::ptrdiff_t>(pz);

  Resolution r;
  auto along_x = [&](std::ptrdiff_t ix) { return img.values(ix * nz + cz); };
  auto along_z = [&](std::ptrdiff_t iz) { return img.values(cx * nz + iz); };
  bool clip = false;
  const double wx = half_width(along_x, cx, nx, -1, half, clip) +
                    half_width(along_x, cx, nx, +1, half, clip);
  r.cross_range = wx * iw.pitch().x();
  r.cross_range_clipped = clip;
  clip = false;
  const double wz = half_width(along_z, cz, nz, -1, half, clip) +
                    half_width(along_z, cz, nz, +1, half, clip);
  r.range = wz * iw.pitch().y();
  r.range_clipped = clip;
  return r;
}

}  // namespace holoimg
