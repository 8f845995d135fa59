#pragma once

#include <complex>
#include <span>

namespace mcnls::detail {

enum class FftDirection { kForward, kBackward };

/// Unnormalized complex DFT over a rank-1 or rank-2 cube of side n, row-major.
/// Forward uses e^{-2 pi i jm/n}. `in` and `out` may alias.
void dft(std::span<const std::complex<double>> in,
         std::span<std::complex<double>> out, int rank, int n,
         FftDirection direction);

}  // namespace mcnls::detail
