#pragma once

#include "holoimg/config.hpp"
#include "holoimg/imaging.hpp"
#include "holoimg/recovery.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holoimg {

struct Preset {
  std::string name;
  std::string description;
  ExperimentConfig config;
  /// Also run the scene displaced by half a pixel along both axes.
  bool off_grid_variant = true;
  /// Only the displaced scene is of interest.
  bool off_grid_only = false;
  /// Imaging data: "phases" (full response) or "intensities" (recovered).
  std::string route = "intensities";
};

std::vector<std::string> preset_names();
/// Throws ValidationError listing the valid names for an unknown preset.
/// Without `full` the desk-scale variant (N = 21, S = 16, 40 x 20 pixels) is returned.
Preset make_preset(const std::string& name, bool full);

/// Moves every scatterer to the centre of the pixel that contains it.
ExperimentConfig snap_to_grid(const ExperimentConfig& config);
/// Displaces every scatterer by half a pixel along both axes.
ExperimentConfig shift_off_grid(const ExperimentConfig& config);

enum class DataRoute {
  phases,       ///< image from the synthesized response, phases included
  intensities,  ///< image from matrices recovered through the illumination protocol
};

DataRoute parse_data_route(const std::string& name);

struct ScattererMatch {
  std::size_t scatterer = 0;  ///< 0-based
  Point2 truth = Point2::Zero();
  Peak peak;
  double dx = 0.0;  ///< peak - truth, cross-range, lambda0
  double dz = 0.0;  ///< peak - truth, range, lambda0
  double distance = 0.0;
  Resolution fwhm;
};

struct FunctionalResult {
  ImageMap image;
  std::vector<Peak> peaks;
  std::vector<ScattererMatch> matches;
};

struct RecoveryStats {
  std::size_t measurements = 0;
  /// max |recovered M_r - P_r^* P_r| / max |P_r^* P_r| when M_r was recovered.
  std::optional<double> mr_error;
  /// Same for the phase-referenced response, compared up to its global phase.
  std::optional<double> response_error;
};

struct PipelineResult {
  std::vector<FunctionalResult> images;
  RecoveryStats recovery;
  std::uint64_t realization = 0;
  double x_d = 0.0;
  double omega_d = 0.0;
  double seconds = 0.0;

  const FunctionalResult& get(const std::string& functional) const;
};

/// Pairs each scatterer with the nearest of the strongest M peaks (M = scatterer count).
std::vector<ScattererMatch> match_peaks(const ImageMap& img, const std::vector<Peak>& peaks,
                                        const std::vector<Scatterer>& truth);

/// Synthesizes data for medium realization `realization`, recovers what the requested
/// functionals need and forms their images.
PipelineResult run_pipeline(const ExperimentConfig& config, std::uint64_t realization = 0,
                            DataRoute route = DataRoute::intensities);

}  // namespace holoimg
