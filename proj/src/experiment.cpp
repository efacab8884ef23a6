#include "holoimg/experiment.hpp"

#include "holoimg/errors.hpp"
#include "holoimg/forward.hpp"
#include "rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace holoimg {

namespace {

const std::vector<std::string> kFunctionals{"km", "interf", "srint", "cint", "music", "signal"};

// Four scatterers around the window centre, slightly off a regular rectangle so that no
// two share a pixel row or column.
const std::vector<std::pair<Point2, Complex>> kLayout{
    {{-42.0, -18.0}, std::polar(1.0, 0.0)},
    {{38.0, -22.0}, std::polar(0.95, 0.6)},
    {{-38.0, 22.0}, std::polar(1.05, -1.2)},
    {{42.0, 18.0}, std::polar(0.9, 2.3)},
};

std::vector<double> equispaced(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

struct Scale {
  std::size_t n;
  std::size_t s;
  Eigen::Vector2d extent;
  Eigen::Vector2d pixel;
};

ExperimentConfig base_config(const Scale& sc, double aperture, double range, double fmin,
                             double fmax) {
  ExperimentConfig cfg;
  cfg.frequencies.f0_thz = 600.0;
  cfg.frequencies.thz = sc.s == 1 ? std::vector<double>{600.0} : equispaced(fmin, fmax, sc.s);
  cfg.array.count = sc.n;
  cfg.array.aperture = aperture;
  cfg.array.center = Point2::Zero();
  cfg.window.center = Point2(0.0, range);
  cfg.window.extent = sc.extent;
  cfg.window.pixel = sc.pixel;
  for (const auto& [offset, alpha] : kLayout) {
    cfg.scatterers.push_back({cfg.window.center + offset, alpha});
  }
  cfg.run.seed = 1;
  return snap_to_grid(cfg);
}

void make_random(ExperimentConfig& cfg, double epsilon, double corr_len, std::size_t realizations) {
  cfg.medium.random = true;
  cfg.medium.epsilon = epsilon;
  cfg.medium.corr_len = corr_len;
  cfg.medium.sigma = epsilon * characteristic_strength(corr_len, cfg.range());
  cfg.medium.seed = 7;
  cfg.run.realizations = realizations;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

bool needs(const std::vector<std::string>& fs, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (std::find(fs.begin(), fs.end(), n) != fs.end()) return true;
  }
  return false;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

// Returns v with M = v^* v when M is numerically rank one.
std::optional<CVector> rank_one_factor(const CMatrix& m) {
  Eigen::Index q = 0;
  m.diagonal().real().maxCoeff(&q);
  const double mqq = m(q, q).real();
  if (!(mqq > 0.0)) return std::nullopt;
  const CVector v = m.row(q).transpose() / std::sqrt(mqq);
  const double scale = max_abs(m);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(v(i)) * v(j)) > 1e-10 * scale) return std::nullopt;
    }
  }
  return v;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig_h1",     "fig_h2",     "fig_h3",     "fig_resolution",
          "fig_stability", "fig_error1", "fig_error2", "moments"};
}

Preset make_preset(const std::string& name, bool full) {
  const Scale full_scale{81, 16, {160.0, 80.0}, {2.0, 1.0}};
  const Scale desk{21, 16, {160.0, 80.0}, {4.0, 4.0}};
  const Scale& sc = full ? full_scale : desk;
  const double a = 500.0;
  const double range = 10000.0;

  Preset p;
  p.name = name;
  if (name == "fig_h1" || name == "fig_h2") {
    const bool single = name == "fig_h1";
    Scale s = sc;
    if (single) s.s = 1;
    p.config = base_config(s, a, range, 580.0, 620.0);
    p.config.run.functionals = {"km", "music", "signal"};
    p.route = "phases";
    p.description = single ? "single-frequency KM, MUSIC and SIGNAL from full data"
                           : "multifrequency KM, MUSIC and SIGNAL from full data";
  } else if (name == "fig_h3") {
    p.config = base_config(sc, a, range, 580.0, 620.0);
    p.config.run.functionals = {"interf"};
    p.description = "single-receiver Interf from intensity-only measurements";
  } else if (name == "fig_resolution") {
    p.config = base_config(sc, 2.0 * a, range, 560.0, 640.0);
    p.config.run.functionals = {"interf"};
    p.off_grid_only = true;
    p.description = "Interf with doubled aperture and bandwidth, scatterers off the grid";
  } else if (name == "fig_stability" || name == "fig_error1" || name == "fig_error2") {
    Scale s = full ? Scale{81, 46, {160.0, 80.0}, {4.0, 2.0}} : Scale{21, 16, {160.0, 80.0}, {4.0, 4.0}};
    const double div = name == "fig_error1" ? 2.0 : name == "fig_error2" ? 3.0 : 1.0;
    p.config = base_config(s, a, range / div, 540.0, 660.0);
    make_random(p.config, 0.2, 100.0, 3);
    p.config.run.functionals = {"interf", "srint"};
    p.off_grid_only = true;
    p.description = div == 1.0 ? "Interf and SRINT in a random medium"
                               : "Interf and SRINT in a random medium, window at L/" +
                                     std::to_string(static_cast<int>(div));
  } else if (name == "moments") {
    p.config = base_config(sc, a, range, 580.0, 620.0);
    p.off_grid_variant = false;
    p.route = "phases";
    p.description = "Monte Carlo check of the travel-time moments";
  } else {
    throw ValidationError("unknown preset '" + name + "'; valid presets: " + join(preset_names()));
  }
  if (p.off_grid_only) p.config = shift_off_grid(p.config);
  return p;
}

ExperimentConfig snap_to_grid(const ExperimentConfig& config) {
  ExperimentConfig out = config;
  const ImageWindow iw = config.image_window();
  for (auto& s : out.scatterers) s.position = iw.point(iw.nearest_index(s.position));
  return out;
}

ExperimentConfig shift_off_grid(const ExperimentConfig& config) {
  ExperimentConfig out = config;
  const Eigen::Vector2d half = 0.5 * config.window.pixel;
  for (auto& s : out.scatterers) s.position += half;
  return out;
}

DataRoute parse_data_route(const std::string& name) {
  if (name == "phases") return DataRoute::phases;
  if (name == "intensities") return DataRoute::intensities;
  throw ValidationError("unknown data route '" + name + "'; valid routes: phases, intensities");
}

const FunctionalResult& PipelineResult::get(const std::string& functional) const {
  for (const auto& r : images) {
    if (r.image.functional == functional) return r;
  }
  throw ValidationError("no image for functional '" + functional + "'");
}

std::vector<ScattererMatch> match_peaks(const ImageMap& img, const std::vector<Peak>& peaks,
                                        const std::vector<Scatterer>& truth) {
  std::vector<ScattererMatch> out;
  if (peaks.empty()) return out;
  const std::size_t m = std::min(peaks.size(), truth.size());
  for (std::size_t j = 0; j < truth.size(); ++j) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const double d = (peaks[k].position - truth[j].position).norm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    ScattererMatch sm;
    sm.scatterer = j;
    sm.truth = truth[j].position;
    sm.peak = peaks[best];
    sm.dx = sm.peak.position.x() - sm.truth.x();
    sm.dz = sm.peak.position.y() - sm.truth.y();
    sm.distance = best_d;
    sm.fwhm = resolution_metrics(img, sm.peak.index);
    out.push_back(sm);
  }
  return out;
}

PipelineResult run_pipeline(const ExperimentConfig& config, std::uint64_t realization,
                            DataRoute route) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& fs = config.run.functionals;
  for (const auto& f : fs) {
    if (std::find(kFunctionals.begin(), kFunctionals.end(), f) == kFunctionals.end()) {
      throw ValidationError("unknown functional '" + f + "'; valid functionals: " +
                            join(kFunctionals));
    }
  }
  const ArrayGeometry geometry = config.geometry();
  const FrequencyGrid grid = config.grid();
  const ImageWindow iw = config.image_window();
  const Scene scene = config.scene();
  const Medium medium = make_medium(config, realization);
  const std::size_t n = geometry.size();
  const std::size_t s = grid.size();
  const std::size_t receiver = config.receiver();
  if (receiver < 1 || receiver > geometry.receiver_count()) {
    throw ValidationError("receiver " + std::to_string(receiver) + " outside 1.." +
                          std::to_string(geometry.receiver_count()));
  }

  const MultiFreqResponse p = response_multi(scene, geometry, medium, grid);
  const bool want_mr = needs(fs, {"interf", "srint"});
  const bool want_phase = needs(fs, {"km", "cint", "music", "signal"});

  PipelineResult out;
  out.realization = realization;
  out.x_d = config.run.x_d_over_a * geometry.aperture();
  out.omega_d = config.run.omega_d_over_b * grid.bandwidth();

  const std::uint64_t noise_seed = detail::splitmix64(config.run.seed ^ (realization << 32));
  CMatrix mr;
  std::optional<CVector> mr_factor;
  CMatrix phat;
  const CVector prow = p.row(receiver - 1);

  if (want_mr) {
    if (route == DataRoute::intensities) {
      SimulatedOracle oracle = SimulatedOracle::from_response(p, receiver, config.run.noise_snr_db,
                                                              noise_seed ^ receiver);
      CountingOracle counter(oracle);
      mr = recover_Mr(counter, n, s).m;
      out.recovery.measurements += counter.count();
      const CMatrix truth = prow.conjugate() * prow.transpose();
      out.recovery.mr_error = max_abs(mr - truth) / max_abs(truth);
      mr_factor = rank_one_factor(mr);
    } else {
      mr_factor = prow;
      mr = prow.conjugate() * prow.transpose();
    }
  }
  if (want_phase) {
    if (route == DataRoute::intensities) {
      if (!geometry.colocated()) {
        throw ValidationError(
            "km, cint, music and signal on intensity data need a colocated array to remove "
            "the receiver phases; use the phases route for this geometry");
      }
      std::vector<CVector> rows(geometry.receiver_count());
      for (std::size_t r = 1; r <= rows.size(); ++r) {
        SimulatedOracle oracle =
            SimulatedOracle::from_response(p, r, config.run.noise_snr_db, noise_seed ^ r);
        CountingOracle counter(oracle);
        rows[r - 1] = recover_reference_row(counter, 1).row;
        out.recovery.measurements += counter.count();
      }
      phat = recover_phase_referenced_response(rows, n, s);
      const Complex c = (phat.conjugate().cwiseProduct(p.matrix())).sum();
      const CMatrix aligned = phat * (std::abs(c) > 0.0 ? c / std::abs(c) : Complex(1.0));
      out.recovery.response_error = max_abs(aligned - p.matrix()) / max_abs(p.matrix());
    } else {
      phat = p.matrix();
    }
  }

  std::optional<CMatrix> g0r;
  auto single_receiver_model = [&]() -> const CMatrix& {
    if (!g0r) g0r = model_matrix_g0r(geometry, grid, iw, receiver);
    return *g0r;
  };
  const std::size_t m_est = config.run.signal_rank ? config.run.signal_rank : scene.size();

  for (const auto& f : fs) {
    std::optional<ImageMap> img;
    if (f == "km") {
      img = image_km(MultiFreqResponse(phat, n, grid), geometry, iw);
    } else if (f == "interf") {
      img = mr_factor ? image_interf_rank_one(*mr_factor, single_receiver_model(), iw)
                      : image_interf(mr, single_receiver_model(), iw);
    } else if (f == "srint") {
      img = image_srint(mr, build_mask(geometry, grid, out.x_d, out.omega_d),
                        single_receiver_model(), iw);
    } else if (f == "cint") {
      img = image_cint(MultiFreqResponse(phat, n, grid), out.x_d, out.omega_d, geometry, iw);
    } else {
      const auto blocks = interferometric_blocks(MultiFreqResponse(phat, n, grid));
      img = f == "music" ? music_image(blocks, grid, m_est, geometry.sources(), iw)
                         : signal_image(blocks, grid, m_est, geometry.sources(), iw);
    }
    img->seed = config.run.seed;
    FunctionalResult fr{*img, {}, {}};
    fr.peaks = extract_peaks(fr.image, config.run.peak_threshold, config.run.peak_separation);
    fr.matches = match_peaks(fr.image, fr.peaks, scene.scatterers());
    out.images.push_back(std::move(fr));
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace holoimg
