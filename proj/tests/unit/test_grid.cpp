#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mcnls/grid.hpp"
#include "mcnls/snapshot.hpp"
#include "support.hpp"

using namespace mcnls;
using namespace testing_support;

TEST_CASE("make_grid coordinates and wavenumbers") {
  const GridSpec g = make_grid(1, 8, 4.0);
  CHECK(g.spacing() == 1.0);
  for (int i = 0; i < 8; ++i) CHECK(g.coordinate(i) == -4.0 + i);
  // FFT order: 0..3 then -4..-1, times pi/4
  CHECK(g.wavenumber(0) == 0.0);
  CHECK(g.wavenumber(3) == doctest::Approx(3 * std::numbers::pi / 4));
  CHECK(g.wavenumber(4) == doctest::Approx(-4 * std::numbers::pi / 4));
  CHECK(g.wavenumber(7) == doctest::Approx(-std::numbers::pi / 4));
  CHECK(g.spacing() * g.n() == 2.0 * g.half_width());

  const GridSpec g2 = make_grid(2, 256, 16.0);
  CHECK(g2.size() == 65536);
  CHECK(g2.spacing() == 0.125);
}

TEST_CASE("make_grid rejects bad parameters") {
  CHECK_THROWS_AS(make_grid(1, 7, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 4, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 8, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 8, -1.0), std::invalid_argument);
}

TEST_CASE("Field rejects wrong size and non-finite samples") {
  const GridSpec g = make_grid(1, 8, 4.0);
  CHECK_THROWS_AS(Field(g, std::vector<Complex>(7)), std::invalid_argument);
  std::vector<Complex> v(8);
  v[3] = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(Field(g, v), std::invalid_argument);
}

TEST_CASE("constant field has only the DC mode") {
  const GridSpec g = make_grid(1, 16, 2.0);
  const Field f = Field::sample(g, [](const Point&) { return Complex(1.0); });
  const SpectralField s = to_spectral(f);
  CHECK(std::abs(s[0] - Complex(2.0 * g.half_width())) < 1e-12);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(std::abs(s[i]) < 1e-12);
}

TEST_CASE("lattice plane wave occupies a single mode") {
  const GridSpec g = make_grid(2, 16, 3.0);
  const int m0 = 3;
  const int m1 = 14;  // wavenumber -2 dk
  const Point k0{g.wavenumber(m0), g.wavenumber(m1)};
  const Field f = Field::sample(g, [&](const Point& x) {
    return std::exp(Complex(0.0, k0[0] * x[0] + k0[1] * x[1]));
  });
  const SpectralField s = to_spectral(f);
  const std::size_t target = static_cast<std::size_t>(m0) * 16 + m1;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i == target) {
      CHECK(std::abs(s[i]) == doctest::Approx(36.0));
    } else {
      CHECK(std::abs(s[i]) < 1e-11);
    }
  }
}

TEST_CASE("forward transform matches the explicit sum") {
  std::mt19937_64 rng(11);
  for (int dim : {1, 2}) {
    const GridSpec g = make_grid(dim, dim == 1 ? 64 : 16, 5.0);
    const Field f = noise_field(g, rng);
    const auto fast = to_spectral(f);
    const auto slow = direct_transform(f);
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      err = std::max(err, std::abs(fast[i] - slow[i]));
      ref = std::max(ref, std::abs(slow[i]));
    }
    CHECK(err / ref < 1e-12);
  }
}

TEST_CASE("round trip, Plancherel and linearity") {
  std::mt19937_64 rng(7);
  const GridSpec g1 = make_grid(1, 128, 8.0);
  const GridSpec g2 = make_grid(2, 32, 8.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const GridSpec& g = trial % 2 == 0 ? g1 : g2;
    const Field f = noise_field(g, rng);
    const SpectralField s = to_spectral(f);
    const double m = mass(f);
    REQUIRE(std::abs(spectral_mass(s) - m) / m < 1e-10);
    REQUIRE(std::abs(lp_norm(f, 2.0) * lp_norm(f, 2.0) - spectral_mass(s)) / m < 1e-10);
    if (trial < 50) {
      const Field back = to_physical(s);
      REQUIRE(max_abs_diff(back, f) / lp_norm(f, INFINITY) < 1e-12);
    }
  }

  const Field a = noise_field(g1, rng);
  const Field b = noise_field(g1, rng);
  const Complex alpha(0.3, -1.2);
  const Complex beta(2.5, 0.4);
  const auto lhs = to_spectral(a * alpha + b * beta);
  const auto sa = to_spectral(a);
  const auto sb = to_spectral(b);
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    err = std::max(err, std::abs(lhs[i] - (alpha * sa[i] + beta * sb[i])));
    ref = std::max(ref, std::abs(lhs[i]));
  }
  CHECK(err / ref < 1e-12);
}

TEST_CASE("lp_norm") {
  const GridSpec g = make_grid(1, 64, 4.0);
  const Field step = Field::sample(g, [](const Point& x) {
    return Complex(std::abs(x[0]) < 1.0 ? 1.0 : 0.0);
  });
  // |x| < 1 with h = 1/8: nodes -7/8 .. 7/8, i.e. 15 points
  const double h = g.spacing();
  for (double p : {1.0, 2.0, 3.5}) {
    CHECK(lp_norm(step, p) == doctest::Approx(std::pow(15 * h, 1.0 / p)).epsilon(1e-14));
  }
  CHECK(lp_norm(step, INFINITY) == 1.0);
  CHECK_THROWS_AS(lp_norm(step, 0.5), std::invalid_argument);

  // ||Q||_2^2 for Q = 3^{1/4} sech^{1/2}(2x), against tanh-sinh quadrature
  const GridSpec gq = make_grid(1, 1024, 16.0);
  const Field q = Field::sample(gq, [](const Point& x) {
    return Complex(std::pow(3.0, 0.25) / std::sqrt(std::cosh(2.0 * x[0])));
  });
  boost::math::quadrature::tanh_sinh<double> ts;
  const double oracle = 2.0 * ts.integrate(
      [](double x) { return std::sqrt(3.0) / std::cosh(2.0 * x); }, 0.0,
      std::numeric_limits<double>::infinity());
  CHECK(oracle == doctest::Approx(std::sqrt(3.0) * std::numbers::pi / 2).epsilon(1e-12));
  CHECK(std::abs(lp_norm(q, 2.0) * lp_norm(q, 2.0) - oracle) < 1e-6);
}

TEST_CASE("gradient_norm_sq") {
  const GridSpec g = make_grid(1, 64, 4.0);
  const double k0 = g.wavenumber(5);
  const Field wave = Field::sample(g, [&](const Point& x) {
    return std::exp(Complex(0.0, k0 * x[0]));
  });
  CHECK(gradient_norm_sq(wave) == doctest::Approx(k0 * k0 * 8.0).epsilon(1e-12));

  const Field one = Field::sample(g, [](const Point&) { return Complex(1.0); });
  CHECK(std::abs(gradient_norm_sq(one)) < 1e-20);

  const GridSpec gg = make_grid(1, 512, 16.0);
  const Field gauss = Field::sample(gg, [](const Point& x) {
    return Complex(std::exp(-x[0] * x[0] / 2.0));
  });
  boost::math::quadrature::tanh_sinh<double> ts;
  const double oracle = ts.integrate(
      [](double x) { return x * x * std::exp(-x * x); },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  CHECK(std::abs(oracle - std::sqrt(std::numbers::pi) / 2) < 1e-12);
  CHECK(std::abs(gradient_norm_sq(gauss) - oracle) < 1e-8);

  // physical route via the spectral gradient agrees with the Fourier route
  std::mt19937_64 rng(3);
  const GridSpec g2 = make_grid(2, 64, 8.0);
  const Field f = random_field(g2, rng);
  const auto grad = gradient(f);
  const double phys = mass(grad[0]) + mass(grad[1]);
  CHECK(phys == doctest::Approx(gradient_norm_sq(f)).epsilon(1e-10));
}

TEST_CASE("laplacian of a Gaussian") {
  const GridSpec g = make_grid(2, 128, 10.0);
  const Field f = Field::sample(g, [](const Point& x) {
    return Complex(std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2.0));
  });
  const Field lap = laplacian(f);
  const Field exact = Field::sample(g, [](const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return Complex((r2 - 2.0) * std::exp(-r2 / 2.0));
  });
  CHECK(max_abs_diff(lap, exact) < 1e-10);
}

TEST_CASE("boundary mass fraction") {
  const GridSpec g = make_grid(1, 256, 16.0);
  const Field narrow = Field::sample(g, [](const Point& x) {
    return Complex(std::exp(-x[0] * x[0]));
  });
  CHECK(boundary_mass_fraction(narrow) < 1e-30);
  const Field flat = Field::sample(g, [](const Point&) { return Complex(1.0); });
  CHECK(boundary_mass_fraction(flat) == doctest::Approx(0.05).epsilon(0.1));
}

TEST_CASE("snapshot round trip is bit exact") {
  std::mt19937_64 rng(5);
  for (int dim : {1, 2}) {
    const GridSpec g = make_grid(dim, 16, 3.5);
    const Field f = noise_field(g, rng);
    std::stringstream ss;
    write_snapshot(ss, f);
    const std::string bytes = ss.str();
    REQUIRE(bytes.size() == 6 + 1 + 1 + 4 + 8 + 16 * g.size());
    CHECK(bytes.substr(0, 6) == "MCNLS1");
    CHECK(bytes[6] == 0x01);
    CHECK(bytes[7] == static_cast<char>(dim));
    CHECK(static_cast<unsigned char>(bytes[8]) == 16);
    CHECK(bytes[9] == 0);
    const Field back = read_snapshot(ss);
    CHECK(back.grid() == g);
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(back[i] == f[i]);
  }
  std::stringstream bad("MCNLS2");
  CHECK_THROWS_AS(read_snapshot(bad), SnapshotError);
  std::stringstream truncated(std::string("MCNLS1\x01\x01", 8));
  CHECK_THROWS_AS(read_snapshot(truncated), SnapshotError);
}
