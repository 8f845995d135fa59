#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mcnls/evolution.hpp"

namespace mcnls {

/// N(t) on a geometric lattice: node heights J0^e_i with integer e_i <= 0,
/// e_0 = 0, neighbouring exponents differing by at most one, and linear
/// interpolation between breakpoints. The K intervals [t_i, t_{i+1}) are the
/// small intervals.
class PiecewiseEnvelope {
 public:
  /// Throws std::invalid_argument when any invariant fails.
  PiecewiseEnvelope(double J0, std::vector<double> times, std::vector<int> exponents);

  double J0() const { return J0_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<int>& exponents() const { return exponents_; }
  std::size_t nodes() const { return times_.size(); }
  std::size_t intervals() const { return times_.size() - 1; }

  double height(std::size_t node) const;
  /// Linear interpolation; constant extension outside [t_0, t_K].
  double value(double t) const;

  bool operator==(const PiecewiseEnvelope&) const = default;

 private:
  double J0_;
  std::vector<double> times_;
  std::vector<int> exponents_;
};

enum class ExtremumKind { kPeak, kValley };

/// A maximal constant run of nodes [start, end] whose neighbours are both
/// lower (peak) or both higher (valley). Runs touching the first or last node
/// are classified from their single neighbour and flagged `boundary`; a run
/// covering the whole envelope is a boundary peak.
struct Extremum {
  ExtremumKind kind = ExtremumKind::kPeak;
  std::size_t start = 0;
  std::size_t end = 0;
  /// Number of small intervals spanned, end - start.
  std::size_t length = 0;
  int exponent = 0;
  double height = 1.0;
  bool boundary = false;
};

std::vector<Extremum> detect_extrema(const PiecewiseEnvelope& e);

/// Lowers every non-boundary peak by one lattice step, which makes it level
/// with its two flanking nodes.
PiecewiseEnvelope smooth_once(const PiecewiseEnvelope& e);
/// m-fold smooth_once. Throws std::invalid_argument for m < 0.
PiecewiseEnvelope smooth(const PiecewiseEnvelope& e, int m);

/// \int |N'| dt, exact for the piecewise-linear envelope.
double total_variation(const PiecewiseEnvelope& e);
/// \int N^3 dt, exact.
double cubic_mass(const PiecewiseEnvelope& e);

enum class PeakScope {
  kAll,
  /// Peaks with 0 < p_k < T: boundary peaks excluded.
  kInterior,
  /// 0 <= p_k: a peak touching T without covering t = 0 is excluded
  /// (its right flank lies past the end of the record).
  kLeading,
};
double peak_height_sum(const PiecewiseEnvelope& e, PeakScope scope = PeakScope::kAll);

/// Sum over small intervals of sup N on the interval.
double small_interval_height_sum(const PiecewiseEnvelope& e);

/// For N_m = smooth(e, m), checks
///   variation:  \int |N_m'| <= 2 sum_peaks N_m(p) + 2
///   heights:    sum_n N(J_n) >= m sum_peaks N_m(p) - m + K / (2 J0^m)
/// with the peak sums over PeakScope::kLeading and K = cubic_mass(e).
struct RatioCertificate {
  int m = 0;
  double variation_m = 0.0;
  double small_interval_sum = 0.0;
  double peak_sum_m = 0.0;
  double cubic_mass = 0.0;
  bool variation_ok = false;
  bool heights_ok = false;
  bool bound_ok() const { return variation_ok && heights_ok; }
};

/// Throws std::invalid_argument for m < 1.
RatioCertificate certify_ratio(const PiecewiseEnvelope& e, int m);

/// CSV with a "# J0=<value>" header line, a "t,N" column line and one row
/// per breakpoint with N written as the integer exponent. On reading, an
/// N token that is not an integer literal (e.g. "0.5", "1.0") is taken as a
/// height and must lie on the lattice. Throws std::runtime_error on
/// malformed input.
void write_envelope_csv(std::ostream& out, const PiecewiseEnvelope& e);
PiecewiseEnvelope read_envelope_csv(std::istream& in);
void save_envelope_csv(const std::string& path, const PiecewiseEnvelope& e);
PiecewiseEnvelope load_envelope_csv(const std::string& path);

/// Lattice envelope of a simulated run. A breakpoint is placed at the first
/// record and wherever the accumulated scattering norm crosses another
/// integer multiple of `norm_per_interval`, plus the last record. N_est is
/// normalized by its first value, converted to the nearest lattice exponent
/// (clamped to <= 0) and moved at most one step per breakpoint.
/// Throws std::invalid_argument when fewer than two breakpoints result.
PiecewiseEnvelope envelope_from_series(const DiagnosticsSeries& series, double J0,
                                       double norm_per_interval = 1.0);

}  // namespace mcnls
