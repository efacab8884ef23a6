#include "holoimg/scene.hpp"

#include "holoimg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace holoimg {

namespace {

void require_distinct(const std::vector<Point2>& pts, const char* what) {
  for (std::size_t a = 0; a < pts.size(); ++a) {
    if (!pts[a].allFinite()) {
      throw ValidationError(std::string(what) + " position " + std::to_string(a + 1) +
                            " is not finite");
    }
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      if ((pts[a] - pts[b]).norm() == 0.0) {
        throw ValidationError(std::string(what) + " positions " + std::to_string(a + 1) +
                              " and " + std::to_string(b + 1) + " coincide");
      }
    }
  }
}

double cross_range_extent(const std::vector<Point2>& pts) {
  if (pts.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                      [](const Point2& a, const Point2& b) { return a.x() < b.x(); });
  return hi->x() - lo->x();
}

std::size_t cell_count(double extent, double pitch, const char* axis) {
  if (!(pitch > 0.0) || !std::isfinite(pitch)) {
    throw ValidationError(std::string("image window pitch along ") + axis + " must be > 0");
  }
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw ValidationError(std::string("image window extent along ") + axis + " must be > 0");
  }
  const double ratio = extent / pitch;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ValidationError(std::string("image window extent along ") + axis +
                          " is not an integer multiple of the pitch");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

std::size_t linear_index(std::size_t s, std::size_t l, std::size_t n) {
  if (n == 0 || s < 1 || s > n || l < 1) {
    throw IndexError("linear_index: need 1 <= s <= N and l >= 1 (s=" + std::to_string(s) +
                     ", l=" + std::to_string(l) + ", N=" + std::to_string(n) + ")");
  }
  return s + (l - 1) * n;
}

std::pair<std::size_t, std::size_t> split_index(std::size_t i, std::size_t n) {
  if (n == 0 || i < 1) {
    throw IndexError("split_index: need i >= 1 and N >= 1");
  }
  return {(i - 1) % n + 1, (i - 1) / n + 1};
}

// ---------------------------------------------------------------------------

ArrayGeometry::ArrayGeometry(std::vector<Point2> positions)
    : sources_(std::move(positions)), colocated_(true) {
  if (sources_.empty()) throw ValidationError("array needs at least one transducer");
  require_distinct(sources_, "transducer");
  if (sources_.size() >= 2 && !(aperture() > 0.0)) {
    throw ValidationError("array has zero cross-range aperture");
  }
  receivers_ = sources_;
}

ArrayGeometry::ArrayGeometry(std::vector<Point2> sources, std::vector<Point2> receivers)
    : sources_(std::move(sources)), receivers_(std::move(receivers)), colocated_(false) {
  if (sources_.empty()) throw ValidationError("array needs at least one source");
  if (receivers_.empty()) throw ValidationError("array needs at least one receiver");
  require_distinct(sources_, "source");
  require_distinct(receivers_, "receiver");
  if (sources_.size() >= 2 && !(aperture() > 0.0)) {
    throw ValidationError("source array has zero cross-range aperture");
  }
  colocated_ = sources_.size() == receivers_.size() &&
               std::equal(sources_.begin(), sources_.end(), receivers_.begin());
}

ArrayGeometry ArrayGeometry::equispaced(double aperture, std::size_t count, const Point2& center) {
  if (count == 0) throw ValidationError("array count must be >= 1");
  if (count > 1 && !(aperture > 0.0)) throw ValidationError("array aperture must be > 0");
  std::vector<Point2> pts(count, center);
  if (count > 1) {
    const double h = aperture / static_cast<double>(count - 1);
    for (std::size_t s = 0; s < count; ++s) {
      pts[s].x() = center.x() - 0.5 * aperture + h * static_cast<double>(s);
    }
  }
  return ArrayGeometry(std::move(pts));
}

double ArrayGeometry::aperture() const { return cross_range_extent(sources_); }

Point2 ArrayGeometry::center() const {
  Point2 c = Point2::Zero();
  for (const auto& p : sources_) c += p;
  return c / static_cast<double>(sources_.size());
}

// ---------------------------------------------------------------------------

FrequencyGrid::FrequencyGrid(std::vector<double> omegas, double f0_thz, double c0_m_per_s)
    : omegas_(std::move(omegas)), f0_thz_(f0_thz), c0_(c0_m_per_s) {
  if (omegas_.empty()) throw ValidationError("frequency grid needs at least one frequency");
  if (!(f0_thz_ > 0.0)) throw ValidationError("central frequency must be > 0");
  if (!(c0_ > 0.0)) throw ValidationError("wave speed must be > 0");
  for (std::size_t l = 0; l < omegas_.size(); ++l) {
    if (!(omegas_[l] > 0.0) || !std::isfinite(omegas_[l])) {
      throw ValidationError("frequencies must be finite and > 0");
    }
    if (l > 0 && !(omegas_[l] > omegas_[l - 1])) {
      throw ValidationError("frequencies must be strictly increasing");
    }
  }
}

FrequencyGrid FrequencyGrid::equispaced_thz(double fmin_thz, double fmax_thz, std::size_t count,
                                            double f0_thz, double c0_m_per_s) {
  if (count == 0) throw ValidationError("frequency count must be >= 1");
  std::vector<double> f(count);
  if (count == 1) {
    f[0] = fmin_thz == fmax_thz ? fmin_thz : 0.5 * (fmin_thz + fmax_thz);
  } else {
    if (!(fmax_thz > fmin_thz)) throw ValidationError("need max frequency > min frequency");
    for (std::size_t l = 0; l < count; ++l) {
      f[l] = fmin_thz + (fmax_thz - fmin_thz) * static_cast<double>(l) /
                            static_cast<double>(count - 1);
    }
  }
  return from_thz(f, f0_thz, c0_m_per_s);
}

FrequencyGrid FrequencyGrid::from_thz(const std::vector<double>& freqs_thz, double f0_thz,
                                      double c0_m_per_s) {
  if (!(f0_thz > 0.0)) throw ValidationError("central frequency must be > 0");
  std::vector<double> w(freqs_thz.size());
  std::transform(freqs_thz.begin(), freqs_thz.end(), w.begin(),
                 [f0_thz](double f) { return f / f0_thz; });
  return FrequencyGrid(std::move(w), f0_thz, c0_m_per_s);
}

std::vector<double> FrequencyGrid::frequencies_thz() const {
  std::vector<double> f(omegas_.size());
  std::transform(omegas_.begin(), omegas_.end(), f.begin(),
                 [this](double w) { return w * f0_thz_; });
  return f;
}

// ---------------------------------------------------------------------------

ImageWindow::ImageWindow(const Point2& origin, const Eigen::Vector2d& extent,
                         const Eigen::Vector2d& pitch)
    : origin_(origin), extent_(extent), pitch_(pitch) {
  if (!origin_.allFinite()) throw ValidationError("image window origin must be finite");
  nx_ = cell_count(extent_.x(), pitch_.x(), "cross-range");
  nz_ = cell_count(extent_.y(), pitch_.y(), "range");
}

ImageWindow ImageWindow::centered(const Point2& center, const Eigen::Vector2d& extent,
                                  const Eigen::Vector2d& pitch) {
  return ImageWindow(center - 0.5 * extent, extent, pitch);
}

std::size_t ImageWindow::index(std::size_t ix, std::size_t iz) const {
  if (ix >= nx_ || iz >= nz_) throw IndexError("pixel coordinates outside the image window");
  return ix * nz_ + iz;
}

std::pair<std::size_t, std::size_t> ImageWindow::coords(std::size_t k) const {
  if (k >= size()) throw IndexError("pixel index outside the image window");
  return {k / nz_, k % nz_};
}

Point2 ImageWindow::point(std::size_t ix, std::size_t iz) const {
  return origin_ + Point2((static_cast<double>(ix) + 0.5) * pitch_.x(),
                          (static_cast<double>(iz) + 0.5) * pitch_.y());
}

Point2 ImageWindow::point(std::size_t k) const {
  auto [ix, iz] = coords(k);
  return point(ix, iz);
}

std::size_t ImageWindow::nearest_index(const Point2& p) const {
  auto clamp_axis = [](double v, std::size_t n) {
    const double c = std::floor(v);
    if (c < 0.0) return std::size_t{0};
    if (c >= static_cast<double>(n)) return n - 1;
    return static_cast<std::size_t>(c);
  };
  const std::size_t ix = clamp_axis((p.x() - origin_.x()) / pitch_.x(), nx_);
  const std::size_t iz = clamp_axis((p.y() - origin_.y()) / pitch_.y(), nz_);
  return ix * nz_ + iz;
}

bool ImageWindow::contains(const Point2& p) const {
  return p.x() >= origin_.x() && p.x() <= origin_.x() + extent_.x() && p.y() >= origin_.y() &&
         p.y() <= origin_.y() + extent_.y();
}

std::vector<Point2> grid_points(const ImageWindow& iw) {
  std::vector<Point2> pts;
  pts.reserve(iw.size());
  for (std::size_t ix = 0; ix < iw.nx(); ++ix) {
    for (std::size_t iz = 0; iz < iw.nz(); ++iz) pts.push_back(iw.point(ix, iz));
  }
  return pts;
}

// ---------------------------------------------------------------------------

Scene::Scene(std::vector<Scatterer> scatterers) : scatterers_(std::move(scatterers)) {
  if (scatterers_.empty()) throw ValidationError("scene needs at least one scatterer");
  for (std::size_t j = 0; j < scatterers_.size(); ++j) {
    const auto& s = scatterers_[j];
    if (!s.position.allFinite()) {
      throw ValidationError("scatterer " + std::to_string(j + 1) + " position is not finite");
    }
    if (s.reflectivity == Complex(0.0, 0.0) || !std::isfinite(std::abs(s.reflectivity))) {
      throw ValidationError("scatterer " + std::to_string(j + 1) +
                            " needs a finite nonzero reflectivity");
    }
  }
}

}  // namespace holoimg
