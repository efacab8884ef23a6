#pragma once

#include "holoimg/imaging.hpp"
#include "holoimg/moments.hpp"
#include "holoimg/random_field.hpp"
#include "holoimg/recovery.hpp"
#include "holoimg/types.hpp"

#include <string>
#include <vector>

namespace holoimg {

/// Complex matrix plus the frequency list (THz) it belongs to.
struct MatrixFile {
  CMatrix matrix;
  std::vector<double> frequencies_thz;
};

/// Binary matrix format: ASCII header
///   HOLOMAT 1
///   rows <R>
///   cols <C>
///   freqs_thz <f1> ... <fS>
///   end
/// followed by R*C row-major (re, im) pairs of little-endian IEEE doubles.
void write_matrix_binary(const std::string& path, const CMatrix& m,
                         const std::vector<double>& frequencies_thz = {});
MatrixFile read_matrix_binary(const std::string& path);

/// Long CSV format "row,col,re,im" with 1-based indices; meant for small matrices.
void write_matrix_csv(const std::string& path, const CMatrix& m);
CMatrix read_matrix_csv(const std::string& path);

/// Recorded intensities, "type,i,j,receiver,intensity" with 1-based indices.
void write_intensity_records(const std::string& path, const std::vector<IntensityRecord>& records);
std::vector<IntensityRecord> read_intensity_records(const std::string& path);

/// Image values as a CSV matrix: line iz holds the cross-range profile at range index iz.
void write_image_csv(const std::string& path, const ImageMap& img);
/// 8-bit binary PGM, min-max normalized; image row iz is range index iz (row 0 nearest
/// to the array), column ix is cross-range index ix.
void write_image_pgm(const std::string& path, const ImageMap& img);
/// key = value lines describing the window, functional and parameters.
void write_image_sidecar(const std::string& path, const ImageMap& img);

/// Field dump: ASCII header (HOLOFIELD 1, nx, nz, spacing, origin, corr_len, seed, end)
/// followed by nx*nz little-endian float32 samples in ix * nz + iz order.
void write_field(const std::string& path, const RandomField& field);
RandomField read_field(const std::string& path);

/// Columns quantity,theory,estimate,stderr,n,z_score.
void write_moments_csv(const std::string& path, const MomentReport& report);

void write_peaks_csv(const std::string& path, const std::vector<Peak>& peaks);

}  // namespace holoimg
