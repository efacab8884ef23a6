#pragma once

#include "holoimg/forward.hpp"
#include "holoimg/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace holoimg {

/// The three illumination families: e_i, e_i + e_j and e_i - i e_j.
enum class IlluminationKind { single, sum, mix };

std::string to_string(IlluminationKind kind);
/// Accepts "single", "sum" and "mix"; throws ValidationError otherwise.
IlluminationKind parse_illumination_kind(const std::string& name);

/// Composite indices are 1-based. A single illumination has j == i.
struct Illumination {
  IlluminationKind kind = IlluminationKind::single;
  std::size_t i = 1;
  std::size_t j = 1;

  static Illumination single(std::size_t i) { return {IlluminationKind::single, i, i}; }
  static Illumination sum(std::size_t i, std::size_t j) { return {IlluminationKind::sum, i, j}; }
  static Illumination mix(std::size_t i, std::size_t j) { return {IlluminationKind::mix, i, j}; }

  std::string tag() const;
  auto key() const { return std::tuple(static_cast<int>(kind), i, j); }
  bool operator==(const Illumination& o) const { return key() == o.key(); }
  bool operator<(const Illumination& o) const { return key() < o.key(); }
};

/// Dense composite illumination vector of length ns.
CVector illumination_vector(const Illumination& f, std::size_t ns);

/// Source of intensity-only measurements |P_r f|^2 at one receiver.
class IntensityOracle {
 public:
  virtual ~IntensityOracle() = default;

  /// Composite length N*S of the illumination vectors.
  virtual std::size_t size() const = 0;
  /// 1-based receiver index.
  virtual std::size_t receiver() const = 0;
  virtual double measure(const Illumination& f) = 0;
  /// Measures a batch; the default runs measure() in order.
  virtual std::vector<double> measure_batch(const std::vector<Illumination>& fs);
};

/// Simulates receiver r from one row of the multifrequency response. Optional complex
/// Gaussian noise is added to the field P_r f before the modulus is taken; the noise
/// draw depends only on (seed, illumination), so results do not depend on call order.
class SimulatedOracle : public IntensityOracle {
 public:
  SimulatedOracle(CVector row, std::size_t receiver, std::optional<double> snr_db = std::nullopt,
                  std::uint64_t noise_seed = 0);
  static SimulatedOracle from_response(const MultiFreqResponse& p, std::size_t receiver,
                                       std::optional<double> snr_db = std::nullopt,
                                       std::uint64_t noise_seed = 0);

  std::size_t size() const override { return static_cast<std::size_t>(row_.size()); }
  std::size_t receiver() const override { return receiver_; }
  double measure(const Illumination& f) override;
  std::vector<double> measure_batch(const std::vector<Illumination>& fs) override;

 private:
  double evaluate(const Illumination& f) const;

  CVector row_;
  std::size_t receiver_;
  std::optional<double> snr_db_;
  double noise_std_ = 0.0;
  std::uint64_t noise_seed_;
};

/// One line of a recorded-intensity file.
struct IntensityRecord {
  Illumination illumination;
  std::size_t receiver = 1;
  double intensity = 0.0;
};

/// Serves measurements previously recorded for one receiver.
class ReplayOracle : public IntensityOracle {
 public:
  ReplayOracle(const std::vector<IntensityRecord>& records, std::size_t ns, std::size_t receiver);

  std::size_t size() const override { return ns_; }
  std::size_t receiver() const override { return receiver_; }
  /// Throws OracleError naming the illumination when it was not recorded.
  double measure(const Illumination& f) override;
  bool has(const Illumination& f) const;

 private:
  std::size_t ns_;
  std::size_t receiver_;
  std::map<Illumination, double> values_;
};

/// Forwards to another oracle and counts calls.
class CountingOracle : public IntensityOracle {
 public:
  explicit CountingOracle(IntensityOracle& inner) : inner_(inner) {}

  std::size_t size() const override { return inner_.size(); }
  std::size_t receiver() const override { return inner_.receiver(); }
  double measure(const Illumination& f) override;
  std::vector<double> measure_batch(const std::vector<Illumination>& fs) override;
  std::size_t count() const { return count_; }

 private:
  IntensityOracle& inner_;
  std::size_t count_ = 0;
};

/// <x, y> = conj(x)^T y from ||x + y||^2, ||x||^2, ||y||^2 and ||x - i y||^2.
Complex polarization_inner(double n_sum, double n_x, double n_y, double n_mix);

enum class Protocol {
  hermitian,      ///< singles plus sum/mix for i < j: ns + ns (ns - 1) measurements
  ordered,        ///< singles plus sum/mix for every i != j: ns + 2 ns (ns - 1)
  reference_row,  ///< singles plus sum/mix of (q, k), k != q: ns + 2 (ns - 1)
};

/// Illuminations issued by a protocol, in the order recover_* requests them.
/// `reference` is the 1-based composite index q used by the reference-row protocol.
std::vector<Illumination> protocol_illuminations(std::size_t ns, Protocol protocol,
                                                 std::size_t reference = 1);
std::size_t protocol_measurement_count(std::size_t ns, Protocol protocol);

struct RecoveredMatrix {
  CMatrix m;  ///< m_ij = conj(p_ri) p_rj
  std::size_t receiver = 1;
  std::size_t measurements = 0;
};

/// Recovers M_r = P_r^* P_r from intensities. With `ordered` every ordered pair is
/// measured and the result is replaced by (M + M^*) / 2.
RecoveredMatrix recover_Mr(IntensityOracle& oracle, std::size_t n, std::size_t s,
                           bool ordered = false);

struct RecoveredRow {
  CVector row;  ///< row(k) = m_qk = conj(p_rq) p_rk
  std::size_t receiver = 1;
  std::size_t reference = 1;
  std::size_t measurements = 0;
};

/// Recovers only row q (1-based) of M_r.
RecoveredRow recover_reference_row(IntensityOracle& oracle, std::size_t q);

/// Reference column (source, frequency) of the reciprocity quotients, both 1-based.
struct ReciprocityReference {
  std::size_t source = 1;
  std::size_t frequency = 1;
  /// Denominators below tol * max diagonal of the reference receiver's matrix are refused.
  double tol = 1e-8;
};

/// Reconstructs P up to one global phase from row q = (source, frequency) of every M_r,
/// using reciprocity P_rs(w) = P_sr(w). rows[r] is the recovered row of receiver r + 1.
/// Throws SingularReferenceError when a quotient denominator is numerically zero.
CMatrix recover_phase_referenced_response(const std::vector<CVector>& rows, std::size_t n,
                                          std::size_t s, const ReciprocityReference& ref = {});

/// conj(p_ik) p_jn for receivers i, j and composite columns k, n (all 1-based),
/// from the single-receiver matrices of a colocated array.
Complex cross_product(const std::vector<CMatrix>& mr, std::size_t n, std::size_t s,
                      std::size_t i, std::size_t k, std::size_t j, std::size_t col_n,
                      const ReciprocityReference& ref = {});

/// Full interferometric matrix P^* P assembled from all N single-receiver matrices
/// through the reciprocity quotients. Refuses non-colocated arrays.
CMatrix recover_full_M(const std::vector<CMatrix>& mr, std::size_t n, std::size_t s,
                       bool colocated, const ReciprocityReference& ref = {});

/// M(w) = P(w)^* P(w).
CMatrix single_frequency_interferometric(const CMatrix& p);

}  // namespace holoimg
