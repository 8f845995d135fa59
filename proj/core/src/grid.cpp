#include "mcnls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "grid_internal.hpp"

namespace mcnls {
namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// (-1)^{m0 + m1} for FFT-ordered indices; folds the box offset -L into the
// transform so that modes approximate the continuum Fourier transform.
double offset_sign(const GridSpec& grid, std::size_t flat) {
  const auto n = static_cast<std::size_t>(grid.n());
  std::size_t parity = flat % n;
  if (grid.dim() == 2) parity += flat / n;
  return (parity % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

GridSpec::GridSpec(int dim, int n, double half_width)
    : dim_(dim), n_(n), half_width_(half_width) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("grid dimension must be 1 or 2, got " +
                                std::to_string(dim));
  }
  if (n < 8 || !is_power_of_two(n)) {
    throw std::invalid_argument("points per axis must be a power of two >= 8, got " +
                                std::to_string(n));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("half-width must be positive and finite");
  }
  spacing_ = 2.0 * half_width / n;
  dk_ = std::numbers::pi / half_width;
}

std::size_t GridSpec::size() const {
  const auto n = static_cast<std::size_t>(n_);
  return dim_ == 1 ? n : n * n;
}

double GridSpec::cell_volume() const {
  return dim_ == 1 ? spacing_ : spacing_ * spacing_;
}

double GridSpec::spectral_cell() const {
  const double c = dk_ / (2.0 * std::numbers::pi);
  return dim_ == 1 ? c : c * c;
}

Point GridSpec::point(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(n_);
  if (dim_ == 1) return {coordinate(static_cast<int>(flat)), 0.0};
  return {coordinate(static_cast<int>(flat / n)), coordinate(static_cast<int>(flat % n))};
}

Point GridSpec::frequency(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(n_);
  if (dim_ == 1) return {wavenumber(static_cast<int>(flat)), 0.0};
  return {wavenumber(static_cast<int>(flat / n)), wavenumber(static_cast<int>(flat % n))};
}

GridSpec make_grid(int dim, int n, double half_width) {
  return GridSpec(dim, n, half_width);
}

Field::Field(GridSpec grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field size does not match grid");
  }
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("field contains non-finite samples");
    }
  }
}

Field Field::zeros(const GridSpec& grid) {
  return Field(grid, std::vector<Complex>(grid.size()));
}

Field Field::sample(const GridSpec& grid,
                    const std::function<Complex(const Point&)>& fn) {
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(grid.point(i));
  return Field(grid, std::move(values));
}

Field Field::operator+(const Field& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("grid mismatch");
  std::vector<Complex> out(values_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += other.values_[i];
  return Field(grid_, std::move(out));
}

Field Field::operator-(const Field& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("grid mismatch");
  std::vector<Complex> out(values_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= other.values_[i];
  return Field(grid_, std::move(out));
}

Field Field::operator*(Complex scale) const {
  std::vector<Complex> out(values_);
  for (auto& v : out) v *= scale;
  return Field(grid_, std::move(out));
}

SpectralField::SpectralField(GridSpec grid, std::vector<Complex> modes)
    : grid_(grid), modes_(std::move(modes)) {
  if (modes_.size() != grid_.size()) {
    throw std::invalid_argument("spectral field size does not match grid");
  }
}

namespace detail {

std::vector<Complex> forward(const GridSpec& grid, std::span<const Complex> values) {
  std::vector<Complex> modes(values.size());
  dft(values, modes, grid.dim(), grid.n(), FftDirection::kForward);
  const double scale = grid.cell_volume();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    modes[i] *= scale * offset_sign(grid, i);
  }
  return modes;
}

std::vector<Complex> inverse(const GridSpec& grid, std::span<const Complex> modes) {
  std::vector<Complex> signed_modes(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    signed_modes[i] = modes[i] * offset_sign(grid, i);
  }
  std::vector<Complex> values(modes.size());
  dft(signed_modes, values, grid.dim(), grid.n(), FftDirection::kBackward);
  // (dk / 2 pi)^d = (1 / (n h))^d
  const double scale = grid.spectral_cell();
  for (auto& v : values) v *= scale;
  return values;
}

double wavenumber_sq(const GridSpec& grid, std::size_t flat) {
  const Point k = grid.frequency(flat);
  return k[0] * k[0] + k[1] * k[1];
}

double quadrature(const GridSpec& grid, std::span<const double> samples) {
  double sum = 0.0;
  for (double s : samples) sum += s;
  return sum * grid.cell_volume();
}

}  // namespace detail

SpectralField to_spectral(const Field& f) {
  return SpectralField(f.grid(), detail::forward(f.grid(), f.values()));
}

Field to_physical(const SpectralField& g) {
  return Field(g.grid(), detail::inverse(g.grid(), g.modes()));
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& v : f.values()) sum += std::norm(v);
    return std::sqrt(sum * f.grid().cell_volume());
  }
  for (const auto& v : f.values()) sum += std::pow(std::abs(v), p);
  return std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

double mass(const Field& f) {
  double sum = 0.0;
  for (const auto& v : f.values()) sum += std::norm(v);
  return sum * f.grid().cell_volume();
}

double spectral_mass(const SpectralField& g) {
  double sum = 0.0;
  for (const auto& v : g.modes()) sum += std::norm(v);
  return sum * g.grid().spectral_cell();
}

double gradient_norm_sq(const SpectralField& g) {
  double sum = 0.0;
  for (std::size_t i = 0; i < g.modes().size(); ++i) {
    sum += detail::wavenumber_sq(g.grid(), i) * std::norm(g.modes()[i]);
  }
  return sum * g.grid().spectral_cell();
}

double gradient_norm_sq(const Field& f) { return gradient_norm_sq(to_spectral(f)); }

Field apply_multiplier(const Field& f,
                       const std::function<Complex(const Point&)>& symbol) {
  auto modes = detail::forward(f.grid(), f.values());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    modes[i] *= symbol(f.grid().frequency(i));
  }
  return Field(f.grid(), detail::inverse(f.grid(), modes));
}

std::vector<Field> gradient(const Field& f) {
  const GridSpec& grid = f.grid();
  const auto modes = detail::forward(grid, f.values());
  std::vector<Field> out;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    std::vector<Complex> d(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
      d[i] = Complex(0.0, grid.frequency(i)[axis]) * modes[i];
    }
    out.emplace_back(grid, detail::inverse(grid, d));
  }
  return out;
}

Field laplacian(const Field& f) {
  const GridSpec& grid = f.grid();
  auto modes = detail::forward(grid, f.values());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    modes[i] *= -detail::wavenumber_sq(grid, i);
  }
  return Field(grid, detail::inverse(grid, modes));
}

double integrate(const GridSpec& grid, std::span<const double> samples) {
  if (samples.size() != grid.size()) {
    throw std::invalid_argument("integrate: sample count does not match grid");
  }
  return detail::quadrature(grid, samples);
}

double boundary_mass_fraction(const Field& f, double annulus) {
  const GridSpec& grid = f.grid();
  const double edge = (1.0 - annulus) * grid.half_width();
  double outer = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = std::norm(f[i]);
    total += w;
    const Point x = grid.point(i);
    if (std::abs(x[0]) >= edge || (grid.dim() == 2 && std::abs(x[1]) >= edge)) {
      outer += w;
    }
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace mcnls
