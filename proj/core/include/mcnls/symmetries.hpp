#pragma once

#include <stdexcept>

#include "mcnls/ground_state.hpp"
#include "mcnls/grid.hpp"

namespace mcnls {

/// lambda^{d/2} f(lambda x), evaluated through the trigonometric interpolant
/// of f. Points with lambda x outside the box read as zero.
/// Throws std::domain_error when more than `guard` of the mass would be lost:
/// spectrum pushed past the Nyquist wavenumber (lambda > 1) or mass pulled in
/// from outside the box (lambda < 1).
Field rescale(const Field& f, double lambda, double guard = 1e-11);

/// f(x - shift), applied as a Fourier phase ramp.
Field translate(const Field& f, const Point& shift);

/// e^{-i t |xi0|^2} e^{i x.xi0} u(x - 2 xi0 t) where f = u(t). xi0 must lie
/// on the wavenumber lattice; otherwise std::invalid_argument names the
/// nearest lattice point.
Field galilean_boost(const Field& f, const Point& xi0, double t);

/// |t|^{-d/2} e^{i(|x|^2 - 4)/(4t)} Q(x/t), the threshold-mass solution of the
/// focusing equation that concentrates at t = 0. Throws for t = 0.
Field pseudoconformal_sample(double t, const GridSpec& grid, const GroundState& q);

/// || i (f_plus - f_minus) / (2 dt) + Delta f0 - mu |f0|^{4/d} f0 ||_2 / ||f0||_2.
double equation_residual(const Field& f_minus, const Field& f0, const Field& f_plus,
                         double dt, double mu);

}  // namespace mcnls
