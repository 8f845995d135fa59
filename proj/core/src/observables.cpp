#include "mcnls/observables.hpp"

#include <cmath>

#include "grid_internal.hpp"

namespace mcnls {

double critical_exponent(int dim) { return 2.0 * (dim + 2) / dim; }

double potential(const Field& u) {
  const int dim = u.grid().dim();
  double sum = 0.0;
  for (const auto& v : u.values()) {
    const double rho = std::norm(v);
    sum += dim == 1 ? rho * rho * rho : rho * rho;
  }
  return sum * u.grid().cell_volume();
}

double energy(const Field& u, double mu) {
  const int dim = u.grid().dim();
  return 0.5 * gradient_norm_sq(u) +
         mu * dim / (2.0 * (dim + 2)) * potential(u);
}

double variance(const Field& u) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point x = u.grid().point(i);
    sum += (x[0] * x[0] + x[1] * x[1]) * std::norm(u[i]);
  }
  return sum * u.grid().cell_volume();
}

Point momentum(const Field& u) {
  // Im \int conj(u) d_j u = (2 pi)^{-d} \int k_j |u^(k)|^2 dk
  const auto modes = detail::forward(u.grid(), u.values());
  Point p{0.0, 0.0};
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const Point k = u.grid().frequency(i);
    const double w = std::norm(modes[i]);
    p[0] += k[0] * w;
    p[1] += k[1] * w;
  }
  const double cell = u.grid().spectral_cell();
  return {p[0] * cell, p[1] * cell};
}

}  // namespace mcnls
