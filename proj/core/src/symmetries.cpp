#include "mcnls/symmetries.hpp"

#include <cmath>
#include <sstream>

#include "grid_internal.hpp"

namespace mcnls {
namespace {

// Row i holds the interpolation weights taking FFT-ordered modes to the
// value at y_i. The Nyquist mode enters as a cosine so that real data stays
// real between nodes.
std::vector<Complex> interpolation_matrix(const GridSpec& grid,
                                          const std::vector<double>& ys) {
  const int n = grid.n();
  const double L = grid.half_width();
  std::vector<Complex> w(ys.size() * n);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = ys[i];
    if (y < -L || y >= L) continue;
    for (int m = 0; m < n; ++m) {
      const double k = grid.wavenumber(m);
      w[i * n + m] = (m == n / 2 ? Complex(std::cos(k * y)) : std::exp(Complex(0.0, k * y))) /
                     (2.0 * L);
    }
  }
  return w;
}

double relative_mass_beyond(const GridSpec& grid, std::span<const Complex> modes,
                            double kcut) {
  double total = 0.0;
  double out = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const Point k = grid.frequency(i);
    const double w = std::norm(modes[i]);
    total += w;
    if (std::abs(k[0]) > kcut || std::abs(k[1]) > kcut) out += w;
  }
  return total > 0.0 ? out / total : 0.0;
}

bool on_lattice(double v, double dk) {
  return std::abs(v / dk - std::round(v / dk)) < 1e-9;
}

}  // namespace

Field rescale(const Field& f, double lambda, double guard) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("rescale factor must be positive");
  }
  const GridSpec& grid = f.grid();
  const int n = grid.n();
  const int dim = grid.dim();
  const auto modes = detail::forward(grid, f.values());

  if (lambda > 1.0) {
    const double kcut = std::abs(grid.wavenumber(n / 2)) / lambda;
    const double lost = relative_mass_beyond(grid, modes, kcut);
    if (lost > guard) {
      std::ostringstream msg;
      msg << "rescale by " << lambda << " pushes a mass fraction " << lost
          << " past the Nyquist wavenumber";
      throw std::domain_error(msg.str());
    }
  } else if (lambda < 1.0) {
    const double L = grid.half_width() * lambda;
    double total = 0.0;
    double out = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Point x = grid.point(i);
      const double w = std::norm(f[i]);
      total += w;
      if (std::abs(x[0]) >= L || (dim == 2 && std::abs(x[1]) >= L)) out += w;
    }
    if (total > 0.0 && out / total > guard) {
      std::ostringstream msg;
      msg << "rescale by " << lambda << " would move a mass fraction " << out / total
          << " outside the box";
      throw std::domain_error(msg.str());
    }
  }

  std::vector<double> ys(n);
  for (int i = 0; i < n; ++i) ys[i] = lambda * grid.coordinate(i);
  const auto w = interpolation_matrix(grid, ys);
  const double amp = std::pow(lambda, 0.5 * dim);

  std::vector<Complex> out(grid.size());
  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      Complex s = 0.0;
      for (int m = 0; m < n; ++m) s += w[static_cast<std::size_t>(i) * n + m] * modes[m];
      out[i] = amp * s;
    }
  } else {
    // contract axis 0 first, then axis 1
    std::vector<Complex> half(grid.size());
    for (int i = 0; i < n; ++i) {
      for (int m0 = 0; m0 < n; ++m0) {
        const Complex wi = w[static_cast<std::size_t>(i) * n + m0];
        if (wi == Complex(0.0)) continue;
        const Complex* row = &modes[static_cast<std::size_t>(m0) * n];
        Complex* dst = &half[static_cast<std::size_t>(i) * n];
        for (int m1 = 0; m1 < n; ++m1) dst[m1] += wi * row[m1];
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Complex s = 0.0;
        const Complex* wj = &w[static_cast<std::size_t>(j) * n];
        const Complex* hi = &half[static_cast<std::size_t>(i) * n];
        for (int m1 = 0; m1 < n; ++m1) s += wj[m1] * hi[m1];
        out[static_cast<std::size_t>(i) * n + j] = amp * s;
      }
    }
  }
  return Field(grid, std::move(out));
}

Field translate(const Field& f, const Point& shift) {
  return apply_multiplier(f, [&](const Point& k) {
    return std::exp(Complex(0.0, -(k[0] * shift[0] + k[1] * shift[1])));
  });
}

Field galilean_boost(const Field& f, const Point& xi0, double t) {
  const GridSpec& grid = f.grid();
  for (int j = 0; j < grid.dim(); ++j) {
    if (!on_lattice(xi0[j], grid.dk())) {
      std::ostringstream msg;
      msg << "boost frequency " << xi0[j] << " is off the lattice; nearest lattice value is "
          << std::round(xi0[j] / grid.dk()) * grid.dk();
      throw std::invalid_argument(msg.str());
    }
  }
  if (grid.dim() == 1 && xi0[1] != 0.0) {
    throw std::invalid_argument("boost frequency has a second component on a 1D grid");
  }
  const Field moved =
      t == 0.0 ? f : translate(f, {2.0 * xi0[0] * t, 2.0 * xi0[1] * t});
  const double xi2 = xi0[0] * xi0[0] + xi0[1] * xi0[1];
  std::vector<Complex> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point x = grid.point(i);
    out[i] = moved[i] * std::exp(Complex(0.0, x[0] * xi0[0] + x[1] * xi0[1] - t * xi2));
  }
  return Field(grid, std::move(out));
}

Field pseudoconformal_sample(double t, const GridSpec& grid, const GroundState& q) {
  if (t == 0.0 || !std::isfinite(t)) {
    throw std::invalid_argument("pseudoconformal sample needs a finite nonzero time");
  }
  if (!(q.field.grid() == grid)) {
    throw std::invalid_argument("ground state must live on the target grid");
  }
  // Q is radial, so Q(x/t) = Q(x/|t|) and rescale supplies |t|^{-d/2}
  const Field profile = rescale(q.field, 1.0 / std::abs(t));
  std::vector<Complex> out(profile.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point x = grid.point(i);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    out[i] = profile[i] * std::exp(Complex(0.0, (r2 - 4.0) / (4.0 * t)));
  }
  return Field(grid, std::move(out));
}

double equation_residual(const Field& f_minus, const Field& f0, const Field& f_plus,
                         double dt, double mu) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Field lap = laplacian(f0);
  const int dim = f0.grid().dim();
  double sum = 0.0;
  for (std::size_t i = 0; i < f0.size(); ++i) {
    const double rho = std::norm(f0[i]);
    const double w = dim == 1 ? rho * rho : rho;
    const Complex r = Complex(0.0, 1.0) * (f_plus[i] - f_minus[i]) / (2.0 * dt) + lap[i] -
                      mu * w * f0[i];
    sum += std::norm(r);
  }
  return std::sqrt(sum * f0.grid().cell_volume()) / lp_norm(f0, 2.0);
}

}  // namespace mcnls
