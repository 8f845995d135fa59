#pragma once

#include "mcnls/grid.hpp"

namespace mcnls {

/// Critical exponent 2(d+2)/d of the potential term.
double critical_exponent(int dim);

/// \int |u|^{2(d+2)/d} dx.
double potential(const Field& u);

/// E(u) = 1/2 \int |grad u|^2 + mu d/(2(d+2)) \int |u|^{2(d+2)/d}.
double energy(const Field& u, double mu);

/// \int |x|^2 |u|^2 dx.
double variance(const Field& u);

/// Im \int conj(u) grad u dx, computed on the Fourier side.
Point momentum(const Field& u);

}  // namespace mcnls
