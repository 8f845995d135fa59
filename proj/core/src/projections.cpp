#include "mcnls/projections.hpp"

#include <cmath>
#include <stdexcept>

#include "grid_internal.hpp"

namespace mcnls {
namespace {

double g(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

void require_scale(double N) {
  if (!(N > 0.0) || !std::isfinite(N)) {
    throw std::invalid_argument("frequency scale N must be positive and finite");
  }
}

double low_symbol(const Point& k, double N) {
  return bump(std::hypot(k[0], k[1]) / N);
}

int padding_factor(int dim) { return dim == 1 ? 4 : 2; }

// Copies modes of `grid` into the FFT-ordered lattice of a grid `factor`
// times finer, leaving the new high modes at zero.
std::vector<Complex> pad_modes(const GridSpec& grid, std::span<const Complex> modes,
                               int factor) {
  const int n = grid.n();
  const int big = n * factor;
  auto wrap = [&](int m) { return m < n / 2 ? m : m - n + big; };
  std::vector<Complex> out(grid.dim() == 1 ? static_cast<std::size_t>(big)
                                           : static_cast<std::size_t>(big) * big);
  if (grid.dim() == 1) {
    for (int m = 0; m < n; ++m) out[wrap(m)] = modes[m];
  } else {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        out[static_cast<std::size_t>(wrap(a)) * big + wrap(b)] =
            modes[static_cast<std::size_t>(a) * n + b];
      }
    }
  }
  return out;
}

std::vector<Complex> truncate_modes(const GridSpec& grid, std::span<const Complex> padded,
                                    int factor) {
  const int n = grid.n();
  const int big = n * factor;
  auto wrap = [&](int m) { return m < n / 2 ? m : m - n + big; };
  std::vector<Complex> out(grid.size());
  if (grid.dim() == 1) {
    for (int m = 0; m < n; ++m) out[m] = padded[wrap(m)];
  } else {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        out[static_cast<std::size_t>(a) * n + b] =
            padded[static_cast<std::size_t>(wrap(a)) * big + wrap(b)];
      }
    }
  }
  return out;
}

void apply_power(std::vector<Complex>& values, int dim, double mu) {
  for (auto& v : values) {
    const double rho = std::norm(v);
    v *= mu * (dim == 1 ? rho * rho : rho);
  }
}

// Modes of F(u) on the original lattice, computed from the modes of u.
std::vector<Complex> dealiased_nonlinearity(const GridSpec& grid,
                                            std::span<const Complex> modes, double mu) {
  const int factor = padding_factor(grid.dim());
  const GridSpec fine(grid.dim(), grid.n() * factor, grid.half_width());
  auto values = detail::inverse(fine, pad_modes(grid, modes, factor));
  apply_power(values, grid.dim(), mu);
  return truncate_modes(grid, detail::forward(fine, values), factor);
}

}  // namespace

double bump(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = g(2.0 - r);
  const double b = g(r - 1.0);
  return a / (a + b);
}

double bump_derivative(double r) {
  const double sign = r < 0.0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r <= 1.0 || r >= 2.0) return 0.0;
  const double s = r - 1.0;
  const double a = g(1.0 - s);
  const double b = g(s);
  const double denom = (a + b) * (a + b);
  return -sign * a * b * (1.0 / ((1.0 - s) * (1.0 - s)) + 1.0 / (s * s)) / denom;
}

Field project_low(const Field& f, double N) {
  require_scale(N);
  return apply_multiplier(f, [N](const Point& k) { return Complex(low_symbol(k, N)); });
}

Field project_band(const Field& f, double N) {
  require_scale(N);
  return apply_multiplier(f, [N](const Point& k) {
    return Complex(low_symbol(k, 2.0 * N) - low_symbol(k, N));
  });
}

Field project_high(const Field& f, double N) {
  require_scale(N);
  return apply_multiplier(f,
                          [N](const Point& k) { return Complex(1.0 - low_symbol(k, N)); });
}

Field nonlinearity(const Field& f, double mu) {
  std::vector<Complex> values(f.values().begin(), f.values().end());
  apply_power(values, f.grid().dim(), mu);
  return Field(f.grid(), std::move(values));
}

double commutator_error(const Field& f, double N, double mu) {
  require_scale(N);
  const GridSpec& grid = f.grid();
  const auto modes = detail::forward(grid, f.values());

  std::vector<double> symbol(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    symbol[i] = low_symbol(grid.frequency(i), N);
  }
  std::vector<Complex> low(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) low[i] = symbol[i] * modes[i];

  const auto f_of_u = dealiased_nonlinearity(grid, modes, mu);
  const auto f_of_low = dealiased_nonlinearity(grid, low, mu);

  double sum = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    sum += std::norm(symbol[i] * f_of_u[i] - f_of_low[i]);
  }
  return std::sqrt(sum * grid.spectral_cell());
}

}  // namespace mcnls
