#pragma once

#include <span>
#include <vector>

#include "mcnls/grid.hpp"

namespace mcnls::detail {

/// Continuum-normalized forward transform of raw samples.
std::vector<Complex> forward(const GridSpec& grid, std::span<const Complex> values);
/// Inverse of `forward`.
std::vector<Complex> inverse(const GridSpec& grid, std::span<const Complex> modes);

/// |k|^2 at an FFT-ordered flat index.
double wavenumber_sq(const GridSpec& grid, std::size_t flat);

/// Rectangle rule over raw real samples.
double quadrature(const GridSpec& grid, std::span<const double> samples);

}  // namespace mcnls::detail
