#include "holoimg/io.hpp"

#include "holoimg/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace holoimg {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  return os;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return is;
}

void finish(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() && s.find_first_not_of(" \r\t", used) != std::string::npos) throw 0;
    return v;
  } catch (...) {
    throw IoError(path + ":" + std::to_string(line) + ": cannot read number '" + s + "'");
  }
}

std::size_t to_index(const std::string& s, const std::string& path, std::size_t line) {
  const double v = to_double(s, path, line);
  if (v < 0.0 || v != std::floor(v)) {
    throw IoError(path + ":" + std::to_string(line) + ": expected a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

// Reads "key value..." header lines until "end".
std::vector<std::pair<std::string, std::string>> read_header(std::istream& is,
                                                             const std::string& magic,
                                                             const std::string& path) {
  std::string line;
  if (!std::getline(is, line) || line != magic) {
    throw IoError("'" + path + "' is not a " + magic + " file");
  }
  std::vector<std::pair<std::string, std::string>> out;
  while (std::getline(is, line)) {
    if (line == "end") return out;
    const auto sp = line.find(' ');
    out.emplace_back(line.substr(0, sp), sp == std::string::npos ? "" : line.substr(sp + 1));
  }
  throw IoError("'" + path + "' has a truncated header");
}

const std::string& header_value(const std::vector<std::pair<std::string, std::string>>& h,
                                const std::string& key, const std::string& path) {
  for (const auto& [k, v] : h) {
    if (k == key) return v;
  }
  throw IoError("'" + path + "' header lacks '" + key + "'");
}

}  // namespace

void write_matrix_binary(const std::string& path, const CMatrix& m,
                         const std::vector<double>& frequencies_thz) {
  auto os = open_out(path, true);
  os << "HOLOMAT 1\nrows " << m.rows() << "\ncols " << m.cols() << "\nfreqs_thz";
  for (double f : frequencies_thz) os << ' ' << f;
  os << "\nend\n";
  std::vector<double> buf(static_cast<std::size_t>(2 * m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      buf[static_cast<std::size_t>(2 * c)] = m(r, c).real();
      buf[static_cast<std::size_t>(2 * c + 1)] = m(r, c).imag();
    }
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(double)));
  }
  finish(os, path);
}

MatrixFile read_matrix_binary(const std::string& path) {
  auto is = open_in(path, true);
  const auto h = read_header(is, "HOLOMAT 1", path);
  MatrixFile out;
  const auto rows = static_cast<Eigen::Index>(std::stoll(header_value(h, "rows", path)));
  const auto cols = static_cast<Eigen::Index>(std::stoll(header_value(h, "cols", path)));
  std::istringstream fs(header_value(h, "freqs_thz", path));
  double f = 0.0;
  while (fs >> f) out.frequencies_thz.push_back(f);
  out.matrix.resize(rows, cols);
  std::vector<double> buf(static_cast<std::size_t>(2 * cols));
  for (Eigen::Index r = 0; r < rows; ++r) {
    is.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!is) throw IoError("'" + path + "' payload is truncated");
    for (Eigen::Index c = 0; c < cols; ++c) {
      out.matrix(r, c) = Complex(buf[static_cast<std::size_t>(2 * c)],
                                 buf[static_cast<std::size_t>(2 * c + 1)]);
    }
  }
  return out;
}

void write_matrix_csv(const std::string& path, const CMatrix& m) {
  auto os = open_out(path);
  os << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      os << r + 1 << ',' << c + 1 << ',' << m(r, c).real() << ',' << m(r, c).imag() << '\n';
    }
  }
  finish(os, path);
}

CMatrix read_matrix_csv(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  std::getline(is, line);
  struct Entry {
    std::size_t r, c;
    Complex v;
  };
  std::vector<Entry> entries;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) throw IoError(path + ":" + std::to_string(lineno) + ": expected 4 fields");
    Entry e{to_index(cells[0], path, lineno), to_index(cells[1], path, lineno),
            Complex(to_double(cells[2], path, lineno), to_double(cells[3], path, lineno))};
    if (e.r < 1 || e.c < 1) throw IoError(path + ":" + std::to_string(lineno) + ": indices are 1-based");
    rows = std::max(rows, e.r);
    cols = std::max(cols, e.c);
    entries.push_back(e);
  }
  if (entries.size() != rows * cols) throw IoError("'" + path + "' does not list every entry");
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (const auto& e : entries) {
    m(static_cast<Eigen::Index>(e.r - 1), static_cast<Eigen::Index>(e.c - 1)) = e.v;
  }
  return m;
}

void write_intensity_records(const std::string& path, const std::vector<IntensityRecord>& records) {
  auto os = open_out(path);
  os << "type,i,j,receiver,intensity\n";
  for (const auto& r : records) {
    os << to_string(r.illumination.kind) << ',' << r.illumination.i << ',' << r.illumination.j
       << ',' << r.receiver << ',' << r.intensity << '\n';
  }
  finish(os, path);
}

std::vector<IntensityRecord> read_intensity_records(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw IoError("'" + path + "' is empty");
  std::vector<IntensityRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 5) throw IoError(path + ":" + std::to_string(lineno) + ": expected 5 fields");
    IntensityRecord r;
    try {
      r.illumination.kind = parse_illumination_kind(cells[0]);
    } catch (const ValidationError& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    r.illumination.i = to_index(cells[1], path, lineno);
    r.illumination.j = to_index(cells[2], path, lineno);
    r.receiver = to_index(cells[3], path, lineno);
    r.intensity = to_double(cells[4], path, lineno);
    out.push_back(r);
  }
  return out;
}

void write_image_csv(const std::string& path, const ImageMap& img) {
  auto os = open_out(path);
  const auto& iw = img.window;
  for (std::size_t iz = 0; iz < iw.nz(); ++iz) {
    for (std::size_t ix = 0; ix < iw.nx(); ++ix) {
      if (ix) os << ',';
      os << img.at(ix, iz);
    }
    os << '\n';
  }
  finish(os, path);
}

void write_image_pgm(const std::string& path, const ImageMap& img) {
  auto os = open_out(path, true);
  const auto& iw = img.window;
  os << "P5\n" << iw.nx() << ' ' << iw.nz() << "\n255\n";
  const double lo = img.values.minCoeff();
  const double hi = img.values.maxCoeff();
  const double span = hi - lo;
  std::vector<unsigned char> row(iw.nx());
  for (std::size_t iz = 0; iz < iw.nz(); ++iz) {
    for (std::size_t ix = 0; ix < iw.nx(); ++ix) {
      const double t = span > 0.0 ? (img.at(ix, iz) - lo) / span : 0.0;
      row[ix] = static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  finish(os, path);
}

void write_image_sidecar(const std::string& path, const ImageMap& img) {
  auto os = open_out(path);
  const auto& iw = img.window;
  os << "functional = " << img.functional << '\n'
     << "origin = " << iw.origin().x() << ' ' << iw.origin().y() << '\n'
     << "extent = " << iw.extent().x() << ' ' << iw.extent().y() << '\n'
     << "pixel = " << iw.pitch().x() << ' ' << iw.pitch().y() << '\n'
     << "nx = " << iw.nx() << '\n'
     << "nz = " << iw.nz() << '\n'
     << "units = lambda0\n"
     << "layout = csv line iz holds range index iz; column ix is cross-range index ix\n"
     << "min = " << img.values.minCoeff() << '\n'
     << "max = " << img.values.maxCoeff() << '\n'
     << "imaginary_residue = " << img.imaginary_residue << '\n';
  if (img.x_d) os << "x_d = " << *img.x_d << '\n';
  if (img.omega_d) os << "omega_d = " << *img.omega_d << '\n';
  if (img.seed) os << "seed = " << *img.seed << '\n';
  finish(os, path);
}

void write_field(const std::string& path, const RandomField& field) {
  auto os = open_out(path, true);
  const auto& s = field.spec();
  os << "HOLOFIELD 1\nnx " << s.nx << "\nnz " << s.nz << "\nspacing " << s.spacing << "\norigin "
     << s.origin.x() << ' ' << s.origin.y() << "\ncorr_len " << s.corr_len << "\nseed "
     << field.seed() << "\nend\n";
  std::vector<float> buf(field.samples().begin(), field.samples().end());
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
  finish(os, path);
}

RandomField read_field(const std::string& path) {
  auto is = open_in(path, true);
  const auto h = read_header(is, "HOLOFIELD 1", path);
  RandomFieldSpec s;
  s.nx = static_cast<std::size_t>(std::stoull(header_value(h, "nx", path)));
  s.nz = static_cast<std::size_t>(std::stoull(header_value(h, "nz", path)));
  s.spacing = std::stod(header_value(h, "spacing", path));
  s.corr_len = std::stod(header_value(h, "corr_len", path));
  std::istringstream o(header_value(h, "origin", path));
  double ox = 0.0;
  double oz = 0.0;
  o >> ox >> oz;
  s.origin = Point2(ox, oz);
  const auto seed = static_cast<std::uint64_t>(std::stoull(header_value(h, "seed", path)));
  std::vector<float> buf(s.nx * s.nz);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!is) throw IoError("'" + path + "' payload is truncated");
  return RandomField(s, std::vector<double>(buf.begin(), buf.end()), seed);
}

void write_moments_csv(const std::string& path, const MomentReport& report) {
  auto os = open_out(path);
  os << "quantity,theory,estimate,stderr,n,z_score\n";
  for (const auto& r : report.rows) {
    os << r.quantity << ',' << r.theory << ',' << r.estimate << ',' << r.stderr_ << ',' << r.n
       << ',' << r.z << '\n';
  }
  finish(os, path);
}

void write_peaks_csv(const std::string& path, const std::vector<Peak>& peaks) {
  auto os = open_out(path);
  os << "rank,ix,iz,x,z,value\n";
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    const auto& p = peaks[k];
    os << k + 1 << ',' << p.ix << ',' << p.iz << ',' << p.position.x() << ','
       << p.position.y() << ',' << p.value << '\n';
  }
  finish(os, path);
}

}  // namespace holoimg
