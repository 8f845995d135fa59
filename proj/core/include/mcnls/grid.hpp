#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mcnls {

using Complex = std::complex<double>;

/// Physical or frequency coordinates of a grid point. The second entry is
/// unused (zero) on one-dimensional grids.
using Point = std::array<double, 2>;

/// Periodic box [-L, L)^d sampled with n points per axis.
///
/// Physical nodes sit at x_i = -L + i h with h = 2L / n. Wavenumbers live on
/// the lattice (pi / L) * {-n/2, ..., n/2 - 1}; spectral arrays are kept in
/// FFT order, so index m maps to m (m < n/2) or m - n (m >= n/2).
class GridSpec {
 public:
  /// Throws std::invalid_argument unless d is 1 or 2, n is a power of two
  /// with n >= 8, and L > 0.
  GridSpec(int dim, int n, double half_width);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return spacing_; }
  /// Wavenumber lattice spacing pi / L.
  double dk() const { return dk_; }
  std::size_t size() const;

  double coordinate(int i) const { return -half_width_ + i * spacing_; }
  double wavenumber(int m) const { return (m < n_ / 2 ? m : m - n_) * dk_; }

  /// Quadrature weight h^d of a physical cell.
  double cell_volume() const;
  /// Quadrature weight (dk / 2 pi)^d of a frequency cell.
  double spectral_cell() const;

  Point point(std::size_t flat) const;
  Point frequency(std::size_t flat) const;

  bool operator==(const GridSpec&) const = default;

 private:
  int dim_;
  int n_;
  double half_width_;
  double spacing_;
  double dk_;
};

GridSpec make_grid(int dim, int n, double half_width);

/// Complex samples u(x_i), row-major with axis 0 slowest. Immutable; all
/// samples are checked finite on construction.
class Field {
 public:
  Field(GridSpec grid, std::vector<Complex> values);

  static Field zeros(const GridSpec& grid);
  static Field sample(const GridSpec& grid,
                      const std::function<Complex(const Point&)>& fn);

  const GridSpec& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  Field operator+(const Field& other) const;
  Field operator-(const Field& other) const;
  Field operator*(Complex scale) const;

 private:
  GridSpec grid_;
  std::vector<Complex> values_;
};

/// Fourier coefficients approximating the continuum transform
/// u^(k) = \int u(x) e^{-i k.x} dx, i.e. the DFT scaled by h^d with the
/// phase of the box offset -L folded in. FFT index order.
class SpectralField {
 public:
  SpectralField(GridSpec grid, std::vector<Complex> modes);

  const GridSpec& grid() const { return grid_; }
  std::span<const Complex> modes() const { return modes_; }
  const Complex& operator[](std::size_t i) const { return modes_[i]; }

 private:
  GridSpec grid_;
  std::vector<Complex> modes_;
};

SpectralField to_spectral(const Field& f);
Field to_physical(const SpectralField& g);

/// Rectangle-rule (h^d sum |f|^p)^{1/p}; p = infinity gives max |f|.
/// Throws std::invalid_argument for p < 1.
double lp_norm(const Field& f, double p);

/// \int |f|^2 by the rectangle rule.
double mass(const Field& f);

/// (2 pi)^{-d} \int |u^|^2 dk on the frequency lattice.
double spectral_mass(const SpectralField& g);

/// \int |grad f|^2 evaluated on the Fourier side.
double gradient_norm_sq(const Field& f);
double gradient_norm_sq(const SpectralField& g);

/// Multiplies every mode by symbol(k) and transforms back.
Field apply_multiplier(const Field& f,
                       const std::function<Complex(const Point&)>& symbol);

/// Spectral partial derivatives, one Field per axis.
std::vector<Field> gradient(const Field& f);
Field laplacian(const Field& f);

/// Rectangle-rule integral of real samples laid out on the grid.
double integrate(const GridSpec& grid, std::span<const double> samples);

/// Fraction of the mass sitting where some coordinate satisfies
/// |x_j| >= (1 - annulus) L.
double boundary_mass_fraction(const Field& f, double annulus = 0.05);

/// Version string reported by the FFT backend.
const char* fft_backend_version();

}  // namespace mcnls
