#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mcnls/grid.hpp"
#include "mcnls/ground_state.hpp"
#include "mcnls/weights.hpp"

namespace mcnls {

/// Samples of (k * b)(x_i) = \int k(x_i - y) b(y) dy for b given on the grid
/// nodes and treated as zero outside the box (no periodic wraparound). The
/// kernel is sampled at the node differences m h with |m_j| < n; evaluated
/// with zero-padded FFTs of side 2n.
std::vector<double> convolve_difference(const GridSpec& grid,
                                        const std::function<double(const Point&)>& kernel,
                                        std::span<const double> samples);

/// Momentum density Im(conj(f) d_j f), one vector per axis.
std::vector<std::vector<double>> momentum_density(const Field& f);

/// \int psi(x N / R) x N Im(conj f f_x) dx on a 1D grid. Throws
/// std::invalid_argument for d != 1 or N <= 0.
double centered_action(const Field& f, double Ntilde, double R, const WeightFamily& w);

/// \iint psi(|x-y| N / R) (x-y)_j N p_j(x) rho(y) dx dy with rho = |f|^2 and
/// R = w.R(). Throws std::invalid_argument for N <= 0 or a dimension mismatch.
double interaction_action(const Field& f, double Ntilde, const WeightFamily& w);

/// Time derivative of interaction_action along i u_t + Delta u = mu |u|^{4/d} u
/// with the scale moving at rate Ntilde_prime.
///
/// flux is assembled from the direct terms (stress tensor, momentum
/// interaction, nonlinear, kernel curvature, scale drift). The same quantity
/// is split as coercive + tail + curvature + envelope_drift, where
///   dispersive = 2N \iint phi (|grad u|^2(x) rho(y) - p(x).p(y)),
///   coercive   = dispersive + mu (2d/(d+2)) N \iint phi |u|^q(x) rho(y),
///   tail       = the (psi - phi) angular remainder (zero in 1D),
///   curvature  = -1/2 \iint div a(x-y) Delta rho(x) rho(y),
///   envelope_drift = N' \iint phi (x-y).p(x) rho(y).
struct MorawetzReport {
  double action = 0.0;
  double flux = 0.0;
  double coercive = 0.0;
  double tail = 0.0;
  double curvature = 0.0;
  double envelope_drift = 0.0;
  double dispersive = 0.0;

  double decomposition_sum() const { return coercive + tail + curvature + envelope_drift; }
};

MorawetzReport interaction_flux(const Field& f, double Ntilde, double Ntilde_prime, double mu,
                                const WeightFamily& w);

/// 1/2 \int |grad f|^2 - d/(2(d+2)) \int |f|^{2(d+2)/d}, the focusing energy.
double defocusing_gap(const Field& f, const GroundState& q);

/// (1 - (||f||_2 / ||Q||_2)^{4/d}) 1/2 \int |grad f|^2: the sharp
/// Gagliardo-Nirenberg lower bound for defocusing_gap below the threshold mass.
double gap_lower_bound(const Field& f, const GroundState& q);

/// \iint sgn(x - y) p(x) rho(y) dx dy in 1D. Throws for d != 1.
double defocusing_interaction_action(const Field& f);

/// Window-frozen frequencies. For each window centre s (in rescaled units,
/// on a lattice of the given spacing covering the box) with window
/// W_s(x) = varphi(|x N / R - s|), xi(s) = \int W_s p / \int W_s rho and
///   before = \int W_s |grad u|^2 \int W_s rho - |\int W_s p|^2,
///   after  = \int W_s |grad(e^{-i x.xi} u)|^2 \int W_s rho.
/// Windows with negligible mass (below 1e-14 of the total) are skipped.
struct FrozenWindow {
  Point s{};
  Point xi{};
  double window_mass = 0.0;
  double before = 0.0;
  double after = 0.0;
};

std::vector<FrozenWindow> galilean_freezing(const Field& f, double Ntilde, const WeightFamily& w,
                                            double spacing = 1.0);

}  // namespace mcnls
