#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcnls/grid.hpp"

namespace mcnls {

struct EvolutionConfig {
  /// Sign of F(u) = mu |u|^{4/d} u: +1 defocusing, -1 focusing.
  double mu = -1.0;
  double dt = 1e-3;
  double t_end = 1.0;
  /// Record diagnostics every `stride` steps (and at the final time).
  int stride = 1;
  /// Zero modes with |k_j| > 2/3 of the Nyquist wavenumber in the linear step.
  bool dealias = true;
  /// When set, dt_k = min(dt, cfl / max|u|^{4/d}).
  bool adaptive = false;
  double cfl = 0.05;
  /// Time attached to the initial data.
  double t0 = 0.0;
  /// Concentration threshold for N/xi/x estimates as a fraction of the mass.
  double eta_fraction = 0.05;
  /// Reject initial data whose boundary annulus holds more than 1e-8 of the mass.
  bool boundary_guard = true;
  /// Blowup is suspected when ||grad u|| exceeds this multiple of its
  /// initial value, or max |u| exceeds `amplitude_limit`.
  double gradient_growth_limit = 1e3;
  double amplitude_limit = 1e6;

  void validate() const;
};

enum DiagnosticFlag : std::uint32_t {
  kFlagNone = 0,
  kFlagBoundaryMass = 1u << 0,
  kFlagBlowupSuspected = 1u << 1,
  kFlagNonFinite = 1u << 2,
};

struct DiagnosticRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double variance = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  Point momentum{};
  /// \int_0^t \int |u|^{2(d+2)/d} dx dt' (midpoint rule per step).
  double scat_accum = 0.0;
  double N_est = 0.0;
  Point xi{};
  Point x{};
  std::uint32_t flags = kFlagNone;
};

struct DiagnosticsSeries {
  int dim = 1;
  std::vector<DiagnosticRecord> records;
};

enum class EvolutionOutcome { kCompleted, kBlowupSuspected, kNonFinite };

struct EvolutionResult {
  DiagnosticsSeries series;
  /// Last state reached (for kNonFinite, the last finite state).
  Field final_state;
  double final_time = 0.0;
  EvolutionOutcome outcome = EvolutionOutcome::kCompleted;
  int steps = 0;
  std::string message;
};

/// One Strang step: e^{i dt/2 Delta}, exact phase e^{-i mu |u|^{4/d} dt},
/// e^{i dt/2 Delta}.
Field step_strang(const Field& f, double dt, double mu, bool dealias = true);

/// Steps to t_end. Consecutive half-steps of the free flow are fused, so the
/// result equals repeated step_strang up to rounding.
EvolutionResult evolve(const Field& f, const EvolutionConfig& cfg);

/// Optional observer invoked with every recorded state.
using SnapshotObserver = std::function<void(double t, const Field& state)>;
EvolutionResult evolve(const Field& f, const EvolutionConfig& cfg,
                       const SnapshotObserver& observer);

/// Centered second difference of the variance against 16 E over interior
/// records. Requires >= 5 records with uniform spacing.
struct VirialDeviation {
  double max_abs = 0.0;
  /// max_abs divided by max |16 E| over the same records.
  double max_rel = 0.0;
};
VirialDeviation virial_check(const DiagnosticsSeries& series);

/// e^{-it Delta} applied spectrally.
Field free_pullback(const Field& f, double t);

/// || e^{-i t2 Delta} u2 - e^{-i t1 Delta} u1 ||_2.
double scattering_cauchy_difference(const Field& u1, double t1, const Field& u2,
                                    double t2);

/// Whether (p, q) satisfies 2/p = d (1/2 - 1/q), 2 <= q <= inf, with p >= 4
/// for d = 1 and p > 2 for d = 2. Pass q = infinity as INFINITY.
bool admissible(double p, double q, int dim);

/// (\int ||u(t)||_{L^q}^p dt)^{1/p} by the trapezoid rule over the samples.
double strichartz_norm(const std::vector<double>& times, const std::vector<Field>& states,
                       double p, double q);

struct ConcentrationEstimate {
  double N = 0.0;
  Point xi{};
  Point x{};
};

/// x: per-axis median of |u|^2; xi: per-axis median of |u^|^2; N: smallest
/// power of two with Fourier mass outside |k - xi| <= N below eta.
ConcentrationEstimate concentration_estimates(const Field& f, double eta);

}  // namespace mcnls
