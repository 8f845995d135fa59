#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "mcnls/grid.hpp"

namespace testing_support {

using mcnls::Complex;
using mcnls::Field;
using mcnls::GridSpec;
using mcnls::Point;

// Smooth random field: random Fourier coefficients under a Gaussian envelope
// of width `kw`, multiplied by a Gaussian window of width `xw`.
inline Field random_field(const GridSpec& grid, std::mt19937_64& rng, double kw = 3.0,
                          double xw = 2.0, int modes = 12) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  struct Wave {
    Point k;
    Complex c;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < modes; ++i) {
    Point k{kw * normal(rng), grid.dim() == 2 ? kw * normal(rng) : 0.0};
    waves.push_back({k, Complex(uni(rng), uni(rng))});
  }
  Point shift{uni(rng), grid.dim() == 2 ? uni(rng) : 0.0};
  return Field::sample(grid, [&](const Point& x) {
    Complex s = 0.0;
    for (const auto& w : waves) {
      s += w.c * std::exp(Complex(0.0, w.k[0] * x[0] + w.k[1] * x[1]));
    }
    const double r2 = (x[0] - shift[0]) * (x[0] - shift[0]) +
                      (x[1] - shift[1]) * (x[1] - shift[1]);
    return s * std::exp(-r2 / (2.0 * xw * xw));
  });
}

// Fully random samples (white noise), for algebraic identities.
inline Field noise_field(const GridSpec& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<Complex> v(grid.size());
  for (auto& c : v) c = Complex(normal(rng), normal(rng));
  return Field(grid, std::move(v));
}

// Continuum-normalized transform by the explicit sum h^d sum_j u_j e^{-i k.x_j}.
inline std::vector<Complex> direct_transform(const Field& f) {
  const GridSpec& g = f.grid();
  std::vector<Complex> out(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    const Point k = g.frequency(m);
    Complex s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const Point x = g.point(j);
      s += f[j] * std::exp(Complex(0.0, -(k[0] * x[0] + k[1] * x[1])));
    }
    out[m] = s * g.cell_volume();
  }
  return out;
}

inline double l2_distance(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

// O(n^{2d}) double sum h^d sum_l k(x_i - x_l) b_l at every node.
inline std::vector<double> direct_convolution(const GridSpec& grid,
                                              const std::function<double(const Point&)>& kernel,
                                              const std::vector<double>& samples) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    double s = 0.0;
    for (std::size_t l = 0; l < grid.size(); ++l) {
      const Point y = grid.point(l);
      s += kernel(Point{x[0] - y[0], x[1] - y[1]}) * samples[l];
    }
    out[i] = s * grid.cell_volume();
  }
  return out;
}

}  // namespace testing_support
