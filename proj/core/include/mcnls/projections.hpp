#pragma once

#include "mcnls/grid.hpp"

namespace mcnls {

/// Smooth radial cutoff: 1 on [0, 1], 0 on [2, inf), with the C-infinity
/// transition g(2 - r) / (g(2 - r) + g(r - 1)), g(t) = exp(-1/t) for t > 0.
double bump(double r);
double bump_derivative(double r);

/// P_{<=N}: multiplies each mode by bump(|k| / N). Throws for N <= 0.
Field project_low(const Field& f, double N);
/// P_N = P_{<=2N} - P_{<=N}.
Field project_band(const Field& f, double N);
/// P_{>N} = 1 - P_{<=N}.
Field project_high(const Field& f, double N);

/// mu |u|^{4/d} u evaluated pointwise on the samples (no dealiasing).
Field nonlinearity(const Field& f, double mu);

/// || P_{<=N} F(f) - F(P_{<=N} f) ||_2 with F(u) = mu |u|^{4/d} u.
/// Both products are formed on a zero-padded grid (4x per axis in 1D, 2x in
/// 2D) so that the modes kept after truncation are alias-free.
double commutator_error(const Field& f, double N, double mu);

}  // namespace mcnls
