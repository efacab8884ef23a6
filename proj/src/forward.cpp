#include "holoimg/forward.hpp"

#include "holoimg/errors.hpp"
#include "parallel.hpp"

#include <cmath>
#include <random>
#include <string>

namespace holoimg {

CVector green_vector(const Point2& y, double omega, const std::vector<Point2>& positions,
                     const Medium& medium) {
  CVector g(static_cast<Eigen::Index>(positions.size()));
  for (std::size_t r = 0; r < positions.size(); ++r) {
    g(static_cast<Eigen::Index>(r)) = medium.green(positions[r], y, omega);
  }
  return g;
}

// ---------------------------------------------------------------------------

PathTable::PathTable(const std::vector<Point2>& elements, const std::vector<Point2>& targets,
                     const Medium& medium)
    : n_elem_(elements.size()),
      n_targ_(targets.size()),
      c0_(medium.c0()),
      dist_(n_elem_ * n_targ_),
      nu_(n_elem_ * n_targ_, 0.0) {
  detail::parallel_for(n_elem_ * n_targ_, [&](std::size_t idx) {
    const std::size_t e = idx / n_targ_;
    const std::size_t t = idx % n_targ_;
    const double d = (elements[e] - targets[t]).norm();
    if (!(d > 0.0)) throw DomainError("a scatterer or pixel coincides with an array element");
    dist_[idx] = d;
    nu_[idx] = medium.travel_time_perturbation(elements[e], targets[t]);
  });
}

CMatrix PathTable::green(double omega) const {
  CMatrix g(static_cast<Eigen::Index>(n_elem_), static_cast<Eigen::Index>(n_targ_));
  for (std::size_t e = 0; e < n_elem_; ++e) {
    for (std::size_t t = 0; t < n_targ_; ++t) {
      const std::size_t idx = e * n_targ_ + t;
      const double d = dist_[idx];
      g(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(t)) =
          std::polar(1.0 / (4.0 * kPi * d), omega * (d / c0_ + nu_[idx]));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

MultiFreqResponse::MultiFreqResponse(CMatrix data, std::size_t sources, FrequencyGrid freqs)
    : data_(std::move(data)), n_(sources), freqs_(std::move(freqs)) {
  if (n_ == 0) throw ValidationError("response needs at least one source");
  if (static_cast<std::size_t>(data_.cols()) != n_ * freqs_.size()) {
    throw ValidationError("response matrix has " + std::to_string(data_.cols()) +
                          " columns, expected N*S = " + std::to_string(n_ * freqs_.size()));
  }
}

CMatrix MultiFreqResponse::block(std::size_t l) const {
  if (l >= freqs_.size()) throw IndexError("frequency index out of range");
  const auto n = static_cast<Eigen::Index>(n_);
  return data_.middleCols(static_cast<Eigen::Index>(l) * n, n);
}

namespace {

std::vector<Point2> scatterer_positions(const Scene& scene) {
  std::vector<Point2> y;
  y.reserve(scene.size());
  for (const auto& s : scene.scatterers()) y.push_back(s.position);
  return y;
}

CVector reflectivities(const Scene& scene) {
  CVector a(static_cast<Eigen::Index>(scene.size()));
  for (std::size_t j = 0; j < scene.size(); ++j) {
    a(static_cast<Eigen::Index>(j)) = scene[j].reflectivity;
  }
  return a;
}

struct ScenePaths {
  PathTable receivers;
  std::optional<PathTable> sources;  // empty when colocated
};

ScenePaths build_paths(const Scene& scene, const ArrayGeometry& geometry, const Medium& medium) {
  const auto y = scatterer_positions(scene);
  ScenePaths paths{PathTable(geometry.receivers(), y, medium), std::nullopt};
  if (!geometry.colocated()) paths.sources.emplace(geometry.sources(), y, medium);
  return paths;
}

CMatrix born_sum(const ScenePaths& paths, const CVector& alpha, double omega) {
  const CMatrix gr = paths.receivers.green(omega);
  const CMatrix gs = paths.sources ? paths.sources->green(omega) : gr;
  return (gr * alpha.asDiagonal()) * gs.transpose();
}

}  // namespace

CMatrix response_single(const Scene& scene, const ArrayGeometry& geometry, const Medium& medium,
                        double omega) {
  const ScenePaths paths = build_paths(scene, geometry, medium);
  return born_sum(paths, reflectivities(scene), omega);
}

MultiFreqResponse response_multi(const Scene& scene, const ArrayGeometry& geometry,
                                 const Medium& medium, const FrequencyGrid& freqs) {
  const ScenePaths paths = build_paths(scene, geometry, medium);
  const CVector alpha = reflectivities(scene);
  const auto nr = static_cast<Eigen::Index>(geometry.receiver_count());
  const auto n = static_cast<Eigen::Index>(geometry.size());
  CMatrix data(nr, n * static_cast<Eigen::Index>(freqs.size()));
  detail::parallel_for(freqs.size(), [&](std::size_t l) {
    const auto col = static_cast<Eigen::Index>(l) * n;
    data.middleCols(col, n) = born_sum(paths, alpha, freqs.omega(l));
  });
  return MultiFreqResponse(std::move(data), geometry.size(), freqs);
}

CVector apply_illumination(const MultiFreqResponse& p, const CVector& f) {
  if (f.size() != p.matrix().cols()) {
    throw ValidationError("illumination length " + std::to_string(f.size()) +
                          " does not match N*S = " + std::to_string(p.matrix().cols()));
  }
  return p.matrix() * f;
}

RVector intensities(const CVector& b) { return b.cwiseAbs2(); }

CVector add_noise(const CVector& b, double snr_db, std::uint64_t seed) {
  if (b.size() == 0) return b;
  const double power = b.cwiseAbs2().mean() * std::pow(10.0, -snr_db / 10.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * power));
  CVector out = b;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += Complex(normal(rng), normal(rng));
  return out;
}

CMatrix model_operator_A0(const CVector& f, double omega, const ArrayGeometry& geometry,
                          const ImageWindow& iw, double c0) {
  if (static_cast<std::size_t>(f.size()) != geometry.size()) {
    throw ValidationError("single-frequency illumination must have one entry per source");
  }
  const auto pts = grid_points(iw);
  const Medium reference = Medium::homogeneous(c0);
  const PathTable rx(geometry.receivers(), pts, reference);
  const CMatrix gr = rx.green(omega);
  CMatrix gs_f;  // 1 x K: sum_s G0(y_k, x_s) f_s
  if (geometry.colocated()) {
    gs_f = f.transpose() * gr;
  } else {
    const PathTable tx(geometry.sources(), pts, reference);
    gs_f = f.transpose() * tx.green(omega);
  }
  return gr * gs_f.row(0).asDiagonal();
}

CVector km_linear_estimate(const CMatrix& a0, const CVector& b) {
  if (a0.rows() != b.size()) throw ValidationError("data length does not match A0 rows");
  return a0.adjoint() * b;
}

}  // namespace holoimg
