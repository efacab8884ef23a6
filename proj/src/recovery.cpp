#include "holoimg/recovery.hpp"

#include "holoimg/errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#include <cmath>
#include <random>

namespace holoimg {

std::string to_string(IlluminationKind kind) {
  switch (kind) {
    case IlluminationKind::single: return "single";
    case IlluminationKind::sum: return "sum";
    case IlluminationKind::mix: return "mix";
  }
  return "?";
}

IlluminationKind parse_illumination_kind(const std::string& name) {
  if (name == "single") return IlluminationKind::single;
  if (name == "sum") return IlluminationKind::sum;
  if (name == "mix") return IlluminationKind::mix;
  throw ValidationError("unknown illumination type '" + name + "' (expected single, sum or mix)");
}

std::string Illumination::tag() const {
  if (kind == IlluminationKind::single) return "single(" + std::to_string(i) + ")";
  return to_string(kind) + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

namespace {

void check_index(const Illumination& f, std::size_t ns) {
  if (f.i < 1 || f.i > ns || f.j < 1 || f.j > ns) {
    throw IndexError("illumination " + f.tag() + " outside 1.." + std::to_string(ns));
  }
  if (f.kind != IlluminationKind::single && f.i == f.j) {
    throw ValidationError("illumination " + f.tag() + " needs two distinct indices");
  }
  if (f.kind == IlluminationKind::single && f.i != f.j) {
    throw ValidationError("single illumination must have j == i");
  }
}

// Field P_r f for the sparse illumination f.
Complex field(const CVector& row, const Illumination& f) {
  const Complex pi = row(static_cast<Eigen::Index>(f.i - 1));
  switch (f.kind) {
    case IlluminationKind::single: return pi;
    case IlluminationKind::sum: return pi + row(static_cast<Eigen::Index>(f.j - 1));
    case IlluminationKind::mix: return pi - kI * row(static_cast<Eigen::Index>(f.j - 1));
  }
  return pi;
}

}  // namespace

CVector illumination_vector(const Illumination& f, std::size_t ns) {
  check_index(f, ns);
  CVector v = CVector::Zero(static_cast<Eigen::Index>(ns));
  v(static_cast<Eigen::Index>(f.i - 1)) = 1.0;
  if (f.kind == IlluminationKind::sum) v(static_cast<Eigen::Index>(f.j - 1)) += 1.0;
  if (f.kind == IlluminationKind::mix) v(static_cast<Eigen::Index>(f.j - 1)) -= kI;
  return v;
}

std::vector<double> IntensityOracle::measure_batch(const std::vector<Illumination>& fs) {
  std::vector<double> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(measure(f));
  return out;
}

// ---------------------------------------------------------------------------

SimulatedOracle::SimulatedOracle(CVector row, std::size_t receiver, std::optional<double> snr_db,
                                 std::uint64_t noise_seed)
    : row_(std::move(row)), receiver_(receiver), snr_db_(snr_db), noise_seed_(noise_seed) {
  if (row_.size() == 0) throw ValidationError("oracle needs a non-empty response row");
  if (receiver_ < 1) throw IndexError("receiver index is 1-based");
  if (snr_db_) {
    const double power = row_.cwiseAbs2().mean() * std::pow(10.0, -*snr_db_ / 10.0);
    noise_std_ = std::sqrt(0.5 * power);
  }
}

SimulatedOracle SimulatedOracle::from_response(const MultiFreqResponse& p, std::size_t receiver,
                                               std::optional<double> snr_db,
                                               std::uint64_t noise_seed) {
  if (receiver < 1 || receiver > p.receivers()) {
    throw IndexError("receiver " + std::to_string(receiver) + " outside 1.." +
                     std::to_string(p.receivers()));
  }
  return SimulatedOracle(p.row(receiver - 1), receiver, snr_db, noise_seed);
}

double SimulatedOracle::evaluate(const Illumination& f) const {
  check_index(f, size());
  Complex b = field(row_, f);
  if (snr_db_) {
    std::uint64_t h = detail::splitmix64(noise_seed_ ^ static_cast<std::uint64_t>(f.kind));
    h = detail::splitmix64(h ^ f.i);
    h = detail::splitmix64(h ^ (f.j << 1));
    std::mt19937_64 rng(h);
    std::normal_distribution<double> normal(0.0, noise_std_);
    const double re = normal(rng);
    b += Complex(re, normal(rng));
  }
  return std::norm(b);
}

double SimulatedOracle::measure(const Illumination& f) { return evaluate(f); }

std::vector<double> SimulatedOracle::measure_batch(const std::vector<Illumination>& fs) {
  std::vector<double> out(fs.size());
  detail::parallel_for(fs.size(), [&](std::size_t k) { out[k] = evaluate(fs[k]); });
  return out;
}

// ---------------------------------------------------------------------------

ReplayOracle::ReplayOracle(const std::vector<IntensityRecord>& records, std::size_t ns,
                           std::size_t receiver)
    : ns_(ns), receiver_(receiver) {
  for (const auto& rec : records) {
    if (rec.receiver != receiver_) continue;
    check_index(rec.illumination, ns_);
    if (!(rec.intensity >= 0.0)) {
      throw ValidationError("recorded intensity for " + rec.illumination.tag() +
                            " is negative or not a number");
    }
    values_[rec.illumination] = rec.intensity;
  }
}

bool ReplayOracle::has(const Illumination& f) const {
  if (values_.count(f)) return true;
  // e_i + e_j is symmetric in (i, j).
  return f.kind == IlluminationKind::sum && values_.count(Illumination::sum(f.j, f.i));
}

double ReplayOracle::measure(const Illumination& f) {
  auto it = values_.find(f);
  if (it == values_.end() && f.kind == IlluminationKind::sum) {
    it = values_.find(Illumination::sum(f.j, f.i));
  }
  if (it == values_.end()) {
    throw OracleError("no recorded intensity for " + f.tag() + " at receiver " +
                      std::to_string(receiver_));
  }
  return it->second;
}

double CountingOracle::measure(const Illumination& f) {
  ++count_;
  return inner_.measure(f);
}

std::vector<double> CountingOracle::measure_batch(const std::vector<Illumination>& fs) {
  count_ += fs.size();
  return inner_.measure_batch(fs);
}

// ---------------------------------------------------------------------------

Complex polarization_inner(double n_sum, double n_x, double n_y, double n_mix) {
  if (!(n_sum >= 0.0) || !(n_x >= 0.0) || !(n_y >= 0.0) || !(n_mix >= 0.0)) {
    throw ValidationError("polarization identity needs nonnegative squared norms");
  }
  return {0.5 * (n_sum - n_x - n_y), 0.5 * (n_mix - n_x - n_y)};
}

std::vector<Illumination> protocol_illuminations(std::size_t ns, Protocol protocol,
                                                 std::size_t reference) {
  std::vector<Illumination> out;
  out.reserve(protocol_measurement_count(ns, protocol));
  for (std::size_t i = 1; i <= ns; ++i) out.push_back(Illumination::single(i));
  switch (protocol) {
    case Protocol::hermitian:
      for (std::size_t i = 1; i <= ns; ++i) {
        for (std::size_t j = i + 1; j <= ns; ++j) {
          out.push_back(Illumination::sum(i, j));
          out.push_back(Illumination::mix(i, j));
        }
      }
      break;
    case Protocol::ordered:
      for (std::size_t i = 1; i <= ns; ++i) {
        for (std::size_t j = 1; j <= ns; ++j) {
          if (i == j) continue;
          out.push_back(Illumination::sum(i, j));
          out.push_back(Illumination::mix(i, j));
        }
      }
      break;
    case Protocol::reference_row:
      if (reference < 1 || reference > ns) throw IndexError("reference index outside 1..N*S");
      for (std::size_t k = 1; k <= ns; ++k) {
        if (k == reference) continue;
        out.push_back(Illumination::sum(reference, k));
        out.push_back(Illumination::mix(reference, k));
      }
      break;
  }
  return out;
}

std::size_t protocol_measurement_count(std::size_t ns, Protocol protocol) {
  switch (protocol) {
    case Protocol::hermitian: return ns + ns * (ns - 1);
    case Protocol::ordered: return ns + 2 * ns * (ns - 1);
    case Protocol::reference_row: return ns + 2 * (ns - 1);
  }
  return 0;
}

RecoveredMatrix recover_Mr(IntensityOracle& oracle, std::size_t n, std::size_t s, bool ordered) {
  const std::size_t ns = n * s;
  if (ns == 0) throw ValidationError("N and S must be >= 1");
  if (oracle.size() != ns) {
    throw ValidationError("oracle length " + std::to_string(oracle.size()) +
                          " does not match N*S = " + std::to_string(ns));
  }
  const Protocol protocol = ordered ? Protocol::ordered : Protocol::hermitian;
  const auto fs = protocol_illuminations(ns, protocol);
  const auto values = oracle.measure_batch(fs);
  if (values.size() != fs.size()) throw OracleError("oracle returned a short batch");

  RecoveredMatrix out;
  out.receiver = oracle.receiver();
  out.measurements = fs.size();
  out.m.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ns));
  for (std::size_t i = 0; i < ns; ++i) {
    out.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
  }
  for (std::size_t k = ns; k < fs.size(); k += 2) {
    const std::size_t i = fs[k].i - 1;
    const std::size_t j = fs[k].j - 1;
    const Complex m = polarization_inner(values[k], values[i], values[j], values[k + 1]);
    out.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m;
    if (!ordered) out.m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(m);
  }
  if (ordered) {
    const CMatrix h = 0.5 * (out.m + out.m.adjoint());
    out.m = h;
  }
  return out;
}

RecoveredRow recover_reference_row(IntensityOracle& oracle, std::size_t q) {
  const std::size_t ns = oracle.size();
  const auto fs = protocol_illuminations(ns, Protocol::reference_row, q);
  const auto values = oracle.measure_batch(fs);
  if (values.size() != fs.size()) throw OracleError("oracle returned a short batch");

  RecoveredRow out;
  out.receiver = oracle.receiver();
  out.reference = q;
  out.measurements = fs.size();
  out.row.resize(static_cast<Eigen::Index>(ns));
  out.row(static_cast<Eigen::Index>(q - 1)) = values[q - 1];
  for (std::size_t k = ns; k < fs.size(); k += 2) {
    const std::size_t j = fs[k].j - 1;
    out.row(static_cast<Eigen::Index>(j)) =
        polarization_inner(values[k], values[q - 1], values[j], values[k + 1]);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t reference_column(std::size_t n, std::size_t s, const ReciprocityReference& ref) {
  if (ref.source < 1 || ref.source > n) throw IndexError("reference source outside 1..N");
  if (ref.frequency < 1 || ref.frequency > s) throw IndexError("reference frequency outside 1..S");
  if (!(ref.tol >= 0.0)) throw ValidationError("reference tolerance must be >= 0");
  return (ref.source - 1) + (ref.frequency - 1) * n;
}

void check_matrices(const std::vector<CMatrix>& mr, std::size_t n, std::size_t s) {
  if (mr.size() != n) {
    throw ValidationError("need one single-receiver matrix per receiver (" + std::to_string(n) +
                          "), got " + std::to_string(mr.size()));
  }
  const auto ns = static_cast<Eigen::Index>(n * s);
  for (const auto& m : mr) {
    if (m.rows() != ns || m.cols() != ns) {
      throw ValidationError("single-receiver matrices must be (N*S) x (N*S)");
    }
  }
}

}  // namespace

CMatrix recover_phase_referenced_response(const std::vector<CVector>& rows, std::size_t n,
                                          std::size_t s, const ReciprocityReference& ref) {
  const std::size_t q = reference_column(n, s, ref);
  const std::size_t a = ref.source - 1;
  const std::size_t ns = n * s;
  if (rows.size() != n) throw ValidationError("need one reference row per receiver");
  for (const auto& r : rows) {
    if (static_cast<std::size_t>(r.size()) != ns) {
      throw ValidationError("reference rows must have length N*S");
    }
  }
  const CVector& ra = rows[a];
  const double mqq = ra(static_cast<Eigen::Index>(q)).real();
  if (!(mqq > 0.0)) {
    throw SingularReferenceError(a + 1, a + 1,
                                 "reference intensity vanishes; choose another reference");
  }
  // Largest diagonal entry of the reference receiver's matrix: |p_ak|^2 = |m_qk|^2 / m_qq.
  const double scale = ra.cwiseAbs2().maxCoeff() / mqq;
  const double floor = ref.tol * scale;
  const double root = std::sqrt(mqq);
  const std::size_t lref = ref.frequency - 1;

  CMatrix p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ns));
  for (std::size_t j = 0; j < n; ++j) {
    // conj(m^a_{q c_j}) = p_aq conj(p_jq) by reciprocity.
    const Complex denom = std::conj(ra(static_cast<Eigen::Index>(j + lref * n)));
    if (std::abs(denom) < floor) {
      throw SingularReferenceError(
          a + 1, j + 1,
          "reference entry for receivers " + std::to_string(a + 1) + " and " +
              std::to_string(j + 1) + " is numerically zero; choose another reference");
    }
    p.row(static_cast<Eigen::Index>(j)) = (root / denom) * rows[j].transpose();
  }
  return p;
}

Complex cross_product(const std::vector<CMatrix>& mr, std::size_t n, std::size_t s,
                      std::size_t i, std::size_t k, std::size_t j, std::size_t col_n,
                      const ReciprocityReference& ref) {
  check_matrices(mr, n, s);
  const std::size_t q = reference_column(n, s, ref);
  const std::size_t ns = n * s;
  if (i < 1 || i > n || j < 1 || j > n) throw IndexError("receiver index outside 1..N");
  if (k < 1 || k > ns || col_n < 1 || col_n > ns) throw IndexError("column index outside 1..N*S");
  const CMatrix& ma = mr[ref.source - 1];
  const std::size_t lref = ref.frequency - 1;
  const auto ci = static_cast<Eigen::Index>((i - 1) + lref * n);
  const auto cj = static_cast<Eigen::Index>((j - 1) + lref * n);
  const Complex denom = ma(cj, ci);
  if (std::abs(denom) < ref.tol * ma.diagonal().real().maxCoeff()) {
    throw SingularReferenceError(i, j,
                                 "reference entry for receivers " + std::to_string(i) + " and " +
                                     std::to_string(j) + " is numerically zero");
  }
  const auto qi = static_cast<Eigen::Index>(q);
  return mr[i - 1](static_cast<Eigen::Index>(k - 1), qi) *
         mr[j - 1](qi, static_cast<Eigen::Index>(col_n - 1)) / denom;
}

CMatrix recover_full_M(const std::vector<CMatrix>& mr, std::size_t n, std::size_t s,
                       bool colocated, const ReciprocityReference& ref) {
  if (!colocated) {
    throw ValidationError(
        "the full interferometric matrix cannot be recovered from single-receiver data of a "
        "non-colocated array: the reciprocity quotients need P_rs = P_sr");
  }
  check_matrices(mr, n, s);
  const auto q = static_cast<Eigen::Index>(reference_column(n, s, ref));
  std::vector<CVector> rows;
  rows.reserve(n);
  for (const auto& m : mr) rows.push_back(m.row(q).transpose());
  const CMatrix p = recover_phase_referenced_response(rows, n, s, ref);
  return p.adjoint() * p;
}

CMatrix single_frequency_interferometric(const CMatrix& p) {
  if (p.rows() != p.cols()) throw ValidationError("response matrix must be square");
  return p.adjoint() * p;
}

}  // namespace holoimg
