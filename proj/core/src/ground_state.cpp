#include "mcnls/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "grid_internal.hpp"
#include "mcnls/observables.hpp"

namespace mcnls {
namespace {

double power_exponent(int dim) { return 1.0 + 4.0 / dim; }

double nonlinear_power(double q, int dim) {
  const double q2 = q * q;
  return dim == 1 ? q2 * q2 * q : q2 * q;
}

GroundState finish(Field field, double residual, int iterations) {
  const int dim = field.grid().dim();
  const double m = mass(field);
  GroundState gs{std::move(field), m, 0.0, residual, iterations};
  gs.gn_constant = (dim + 2.0) / dim * std::pow(m, -2.0 / dim);
  return gs;
}

Field default_guess(const GridSpec& grid) {
  return Field::sample(grid, [](const Point& x) {
    return Complex(2.0 * std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])));
  });
}

}  // namespace

GroundState closed_form_1d(const GridSpec& grid) {
  if (grid.dim() != 1) throw std::invalid_argument("closed_form_1d requires d = 1");
  if (grid.half_width() < 10.0) {
    throw std::invalid_argument("closed_form_1d requires L >= 10");
  }
  const double amp = std::pow(3.0, 0.25);
  std::vector<Complex> values(grid.size());
  std::vector<double> res(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = grid.point(i)[0];
    const double s = 1.0 / std::cosh(2.0 * x);
    const double q = amp * std::sqrt(s);
    const double q2 = q * q;
    const double qxx = q * (1.0 - 3.0 * s * s);
    values[i] = q;
    const double r = qxx + q2 * q2 * q - q;
    res[i] = r * r;
  }
  Field field(grid, std::move(values));
  const double residual = std::sqrt(integrate(grid, res)) / lp_norm(field, 2.0);
  return finish(std::move(field), residual, 0);
}

double spectral_residual(const Field& q) {
  const Field lap = laplacian(q);
  const int dim = q.grid().dim();
  std::vector<double> res(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double v = q[i].real();
    const Complex r = lap[i] + nonlinear_power(v, dim) - q[i];
    res[i] = std::norm(r);
  }
  return std::sqrt(integrate(q.grid(), res)) / lp_norm(q, 2.0);
}

GroundState solve_petviashvili(const GridSpec& grid, double tol, int max_iter,
                               std::optional<Field> initial) {
  if (!(tol >= 1e-12)) throw std::invalid_argument("tolerance must be >= 1e-12");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  const int dim = grid.dim();
  const double r = power_exponent(dim);
  const double gamma = r / (r - 1.0);

  Field start = initial ? std::move(*initial) : default_guess(grid);
  if (!(start.grid() == grid)) throw std::invalid_argument("initial guess grid mismatch");

  std::vector<double> q(grid.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = start[i].real();

  std::vector<double> symbol(grid.size());
  for (std::size_t i = 0; i < symbol.size(); ++i) {
    symbol[i] = 1.0 + detail::wavenumber_sq(grid, i);
  }

  std::vector<Complex> buf(grid.size());
  double diff = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < q.size(); ++i) buf[i] = q[i];
    const auto q_hat = detail::forward(grid, buf);
    for (std::size_t i = 0; i < q.size(); ++i) {
      buf[i] = std::copysign(nonlinear_power(std::abs(q[i]), dim), q[i]);
    }
    auto n_hat = detail::forward(grid, buf);

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < q_hat.size(); ++i) {
      num += symbol[i] * std::norm(q_hat[i]);
      den += (std::conj(q_hat[i]) * n_hat[i]).real();
    }
    const double s = num / den;
    if (!std::isfinite(s) || !(den > 0.0)) {
      throw SolverError("Petviashvili iteration collapsed to zero", diff);
    }
    const double scale = std::pow(s, gamma);
    for (std::size_t i = 0; i < n_hat.size(); ++i) n_hat[i] *= scale / symbol[i];
    const auto next = detail::inverse(grid, n_hat);

    double d2 = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double v = next[i].real();
      d2 += (v - q[i]) * (v - q[i]);
      m2 += v * v;
      q[i] = v;
    }
    diff = std::sqrt(d2 * grid.cell_volume());
    if (!std::isfinite(diff) || m2 * grid.cell_volume() < 1e-20) {
      throw SolverError("Petviashvili iteration collapsed to zero", diff);
    }
    if (diff < tol) {
      std::vector<Complex> values(q.begin(), q.end());
      Field field(grid, std::move(values));
      const double residual = spectral_residual(field);
      return finish(std::move(field), residual, it);
    }
  }
  throw SolverError("Petviashvili iteration did not converge in " +
                        std::to_string(max_iter) + " iterations",
                    diff);
}

PohozaevResiduals pohozaev_check(const GroundState& q) {
  const int d = q.field.grid().dim();
  const double m = mass(q.field);
  if (!(m > 0.0)) throw std::invalid_argument("pohozaev_check: zero field");
  const double k = gradient_norm_sq(q.field);
  const double p = potential(q.field);
  PohozaevResiduals out;
  out.energy = std::abs(-k + p - m) / m;
  out.dilation =
      std::abs(0.5 * (d - 2) * k - d * d / (2.0 * (d + 2)) * p + 0.5 * d * m) / m;
  return out;
}

double gn_ratio(const Field& f, const GroundState& q) {
  const int d = f.grid().dim();
  const double m = mass(f);
  if (!(m > 0.0)) throw std::invalid_argument("gn_ratio: zero field");
  const double rhs = (d + 2.0) / d * std::pow(m / q.mass_sq, 2.0 / d) * gradient_norm_sq(f);
  return potential(f) / rhs;
}

Field center_on_peak(const Field& f) {
  const GridSpec& grid = f.grid();
  const auto values = f.values();
  const auto peak = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end(),
                       [](const Complex& a, const Complex& b) {
                         return std::abs(a) < std::abs(b);
                       }) -
      values.begin());
  const int n = grid.n();
  const int half = n / 2;  // index of x = 0
  std::vector<Complex> out(values.size());
  if (grid.dim() == 1) {
    const int shift = half - static_cast<int>(peak);
    for (int i = 0; i < n; ++i) out[((i + shift) % n + n) % n] = values[i];
  } else {
    const int s0 = half - static_cast<int>(peak / n);
    const int s1 = half - static_cast<int>(peak % n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int a2 = ((a + s0) % n + n) % n;
        const int b2 = ((b + s1) % n + n) % n;
        out[static_cast<std::size_t>(a2) * n + b2] = values[static_cast<std::size_t>(a) * n + b];
      }
    }
  }
  return Field(grid, std::move(out));
}

}  // namespace mcnls
