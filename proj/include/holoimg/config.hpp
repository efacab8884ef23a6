#pragma once

#include "holoimg/medium.hpp"
#include "holoimg/scene.hpp"
#include "holoimg/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holoimg {

/// Either an equispaced linear array (count, aperture, center) or explicit positions.
/// `receivers` is non-empty only for arrays whose receivers differ from the sources.
struct ArraySpec {
  std::size_t count = 0;
  double aperture = 0.0;
  Point2 center = Point2::Zero();
  std::vector<Point2> positions;
  std::vector<Point2> receivers;

  ArrayGeometry build() const;
};

struct FrequencySpec {
  std::vector<double> thz;
  double f0_thz = 600.0;
  double c0_m_per_s = 3.0e8;

  FrequencyGrid build() const;
  double lambda0_m() const { return c0_m_per_s / (f0_thz * 1e12); }
};

struct WindowSpec {
  Point2 center = Point2::Zero();
  Eigen::Vector2d extent = Eigen::Vector2d::Zero();
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();

  ImageWindow build() const { return ImageWindow::centered(center, extent, pixel); }
};

struct MediumSpec {
  bool random = false;
  /// Fluctuation strength; when the document gives epsilon instead, sigma is derived
  /// from sigma0 = lambda0 / sqrt(l L) with L the array-to-window-centre distance.
  double sigma = 0.0;
  std::optional<double> epsilon;
  double corr_len = 0.0;
  double grid_spacing = 0.0;  ///< 0 selects corr_len / 4
  std::uint64_t seed = 0;
};

struct RunSpec {
  std::uint64_t seed = 0;
  std::size_t receiver = 0;  ///< 1-based; 0 selects the array centre
  std::vector<std::string> functionals{"km", "interf", "srint"};
  double x_d_over_a = 0.25;
  double omega_d_over_b = 0.12;
  std::size_t signal_rank = 0;  ///< 0 selects the scatterer count
  std::optional<double> noise_snr_db;
  double peak_threshold = 0.3;
  double peak_separation = 3.0;  ///< cells
  std::size_t realizations = 1;  ///< medium realizations (random media)
};

struct ExperimentConfig {
  ArraySpec array;
  FrequencySpec frequencies;
  WindowSpec window;
  std::vector<Scatterer> scatterers;
  MediumSpec medium;
  RunSpec run;

  ArrayGeometry geometry() const { return array.build(); }
  FrequencyGrid grid() const { return frequencies.build(); }
  ImageWindow image_window() const { return window.build(); }
  Scene scene() const { return Scene(scatterers); }
  /// Distance from the array centre to the window centre, in lambda0.
  double range() const;
  /// 1-based receiver used by single-receiver functionals.
  std::size_t receiver() const;
};

/// Parses a JSON document with sections "array", "frequencies", "window", "scene",
/// "medium" and "run". Lengths are numbers in lambda0 or strings with a unit
/// ("250 nm", "1.5 um", "500 lambda0"); frequencies are numbers in THz or strings
/// with a unit ("600 THz"). Throws ParseError with the offending key path.
ExperimentConfig parse_experiment_config(const std::string& text);

/// Canonical JSON form (lengths in lambda0, frequencies in THz); parses back to the
/// same values.
std::string serialize_experiment_config(const ExperimentConfig& config);

/// Parses "<value> <unit>" lengths into lambda0.
double parse_length(const std::string& text, double lambda0_m);

/// Random or homogeneous medium for realization `index`. Random fields cover every
/// array element, pixel and scatterer with a margin of three correlation lengths.
Medium make_medium(const ExperimentConfig& config, std::uint64_t index = 0);

}  // namespace holoimg
