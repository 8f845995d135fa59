#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mcnls/evolution.hpp"
#include "mcnls/ground_state.hpp"
#include "mcnls/observables.hpp"
#include "mcnls/symmetries.hpp"
#include "support.hpp"

using namespace mcnls;
using namespace testing_support;

namespace {

Field gaussian(const GridSpec& g, double amp, double width = 1.0) {
  return Field::sample(g, [&](const Point& x) {
    return Complex(amp * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * width * width)));
  });
}

Field modulus(const Field& f) {
  std::vector<Complex> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f[i]);
  return Field(f.grid(), std::move(v));
}

}  // namespace

TEST_CASE("plane wave follows the exact dispersion relation") {
  const GridSpec g = make_grid(1, 64, 4.0 * std::numbers::pi);
  const int m = 5;
  const double k0 = g.wavenumber(m);
  const Complex amp(0.8, 0.3);
  for (double mu : {1.0, -1.0}) {
    const double a4 = std::pow(std::abs(amp), 4);
    const double omega = -k0 * k0 - mu * a4;
    Field u = Field::sample(g, [&](const Point& x) {
      return amp * std::exp(Complex(0.0, k0 * x[0]));
    });
    const double dt = 0.01;
    for (int s = 0; s < 100; ++s) u = step_strang(u, dt, mu);
    const Field exact = Field::sample(g, [&](const Point& x) {
      return amp * std::exp(Complex(0.0, k0 * x[0] + omega * 1.0));
    });
    CHECK(max_abs_diff(u, exact) < 1e-12);
  }
}

TEST_CASE("soliton modulus is stationary") {
  const GridSpec g = make_grid(1, 512, 16.0);
  const GroundState q = solve_petviashvili(g, 1e-12, 500);
  EvolutionConfig cfg;
  cfg.mu = -1.0;
  cfg.dt = 1e-4;
  cfg.t_end = 1.0;
  cfg.stride = 1000;
  double worst = 0.0;
  const auto res = evolve(q.field, cfg, [&](double, const Field& u) {
    worst = std::max(worst, l2_distance(modulus(u), q.field));
  });
  CHECK(res.outcome == EvolutionOutcome::kCompleted);
  CHECK(res.series.records.size() == 11);
  CHECK(worst < 1e-6);
  // u(1) = e^{i} Q
  CHECK(l2_distance(res.final_state, q.field * std::exp(Complex(0.0, 1.0))) < 1e-6);
}

TEST_CASE("Strang splitting is second order") {
  const GridSpec g = make_grid(1, 256, 16.0);
  const Field u0 = gaussian(g, 1.2);
  auto run = [&](double dt) {
    Field u = u0;
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int s = 0; s < steps; ++s) u = step_strang(u, dt, 1.0);
    return u;
  };
  const double base = 0.02;
  const Field ref = run(base / 8);
  const double e1 = l2_distance(run(base), ref);
  const double e2 = l2_distance(run(base / 2), ref);
  // Richardson: e(h) - e(h/8) ~ C h^2 (1 - 1/64), e(h/2) ~ C h^2 (1/4 - 1/64)
  const double expected = (1.0 - 1.0 / 64) / (0.25 - 1.0 / 64);
  CHECK(e1 / e2 == doctest::Approx(expected).epsilon(0.1));
}

TEST_CASE("fused evolve equals repeated steps") {
  const GridSpec g = make_grid(1, 128, 12.0);
  const Field u0 = gaussian(g, 1.0);
  EvolutionConfig cfg;
  cfg.mu = -1.0;
  cfg.dt = 0.01;
  cfg.t_end = 0.5;
  cfg.stride = 7;
  const auto res = evolve(u0, cfg);
  Field u = u0;
  for (int s = 0; s < 50; ++s) u = step_strang(u, 0.01, -1.0);
  CHECK(max_abs_diff(res.final_state, u) < 1e-12);
  CHECK(res.final_time == doctest::Approx(0.5));
  CHECK(res.series.records.back().t == doctest::Approx(0.5));
  // records at 0, 7 dt, 14 dt, ... and the final time
  CHECK(res.series.records.size() == 9);
  for (std::size_t i = 1; i < res.series.records.size(); ++i) {
    CHECK(res.series.records[i].t > res.series.records[i - 1].t);
    CHECK(res.series.records[i].scat_accum >= res.series.records[i - 1].scat_accum);
  }
}

TEST_CASE("conservation of mass and energy") {
  const GridSpec g = make_grid(1, 512, 16.0);
  SUBCASE("small data over a long run") {
    const Field u0 = gaussian(g, std::sqrt(0.01 / std::sqrt(std::numbers::pi)));
    CHECK(mass(u0) == doctest::Approx(0.01));
    EvolutionConfig cfg;
    cfg.mu = 1.0;
    cfg.dt = 1e-3;
    cfg.t_end = 10.0;
    cfg.stride = 500;
    const auto res = evolve(u0, cfg);
    for (const auto& r : res.series.records) {
      REQUIRE(std::abs(r.mass - 0.01) / 0.01 < 1e-10);
    }
  }
  SUBCASE("both signs over 10^4 steps") {
    for (double mu : {1.0, -1.0}) {
      const Field u0 = gaussian(g, 1.0);
      EvolutionConfig cfg;
      cfg.mu = mu;
      cfg.dt = 1e-4;
      cfg.t_end = 1.0;
      cfg.stride = 100;
      const auto res = evolve(u0, cfg);
      const auto& first = res.series.records.front();
      for (const auto& r : res.series.records) {
        REQUIRE(std::abs(r.mass - first.mass) / first.mass < 1e-10);
        REQUIRE(std::abs(r.energy - first.energy) / std::abs(first.energy) < 1e-6);
      }
    }
  }
}

TEST_CASE("boundary guard and flags") {
  const GridSpec g = make_grid(1, 128, 4.0);
  const Field wide = gaussian(g, 1.0, 2.0);
  EvolutionConfig cfg;
  cfg.t_end = 0.1;
  CHECK_THROWS_AS(evolve(wide, cfg), std::invalid_argument);
  cfg.boundary_guard = false;
  const auto res = evolve(wide, cfg);
  CHECK((res.series.records.front().flags & kFlagBoundaryMass) != 0);

  EvolutionConfig bad;
  bad.mu = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.mu = 1.0;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("pseudoconformal data triggers blowup detection") {
  const GridSpec g = make_grid(1, 4096, 16.0);
  const GroundState q = closed_form_1d(g);
  const Field v = pseudoconformal_sample(-1.0, g, q);
  EvolutionConfig cfg;
  cfg.mu = -1.0;
  cfg.dt = 1e-3;
  cfg.t0 = -1.0;
  cfg.t_end = 1.0;
  cfg.stride = 1000000;
  cfg.adaptive = true;
  cfg.cfl = 0.02;
  cfg.gradient_growth_limit = 10.0;
  const auto res = evolve(v, cfg);
  CHECK(res.outcome == EvolutionOutcome::kBlowupSuspected);
  // ||grad v(t)|| ~ |t|^{-1} for small |t|, so growth 10 happens near t = -0.1
  CHECK(res.final_time < -0.05);
  CHECK(res.final_time > -0.2);
  CHECK((res.series.records.back().flags & kFlagBlowupSuspected) != 0);
}

TEST_CASE("virial identity") {
  const GridSpec g = make_grid(1, 512, 16.0);
  EvolutionConfig cfg;
  cfg.mu = 1.0;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  SUBCASE("linear regime") {
    const auto res = evolve(gaussian(g, 1e-6), cfg);
    CHECK(virial_check(res.series).max_rel < 0.01);
  }
  SUBCASE("defocusing, mass one") {
    const Field u0 = gaussian(g, std::pow(std::numbers::pi, -0.25));
    CHECK(mass(u0) == doctest::Approx(1.0));
    const auto res = evolve(u0, cfg);
    CHECK(virial_check(res.series).max_rel < 0.01);
  }
  SUBCASE("soliton") {
    const GroundState q = solve_petviashvili(g, 1e-12, 500);
    cfg.mu = -1.0;
    cfg.dt = 1e-4;
    cfg.stride = 10;
    cfg.t_end = 0.05;
    const auto res = evolve(q.field, cfg);
    CHECK(virial_check(res.series).max_abs < 1e-6);
  }
  SUBCASE("rejects short or irregular series") {
    DiagnosticsSeries s;
    s.records.resize(4);
    CHECK_THROWS_AS(virial_check(s), std::invalid_argument);
    s.records.resize(6);
    for (int i = 0; i < 6; ++i) s.records[i].t = i * i;
    CHECK_THROWS_AS(virial_check(s), std::invalid_argument);
  }
}

TEST_CASE("free pullback and scattering witness") {
  const GridSpec g = make_grid(1, 256, 16.0);
  const Field u0 = gaussian(g, 1.0) * Complex(1.0, 0.5);
  const Field u1 = free_pullback(u0, -0.7);  // e^{0.7 i Delta} u0
  const Field u2 = free_pullback(u0, -1.3);
  CHECK(scattering_cauchy_difference(u1, 0.7, u2, 1.3) < 1e-10);

  const GridSpec big = make_grid(1, 4096, 128.0);
  EvolutionConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 10.0;
  cfg.stride = 5000;
  cfg.mu = 1.0;
  const Field small = gaussian(big, std::sqrt(0.1 / std::sqrt(std::numbers::pi)));
  Field at5 = Field::zeros(big);
  Field at10 = Field::zeros(big);
  const auto res = evolve(small, cfg, [&](double t, const Field& u) {
    if (std::abs(t - 5.0) < 1e-9) at5 = u;
    if (std::abs(t - 10.0) < 1e-9) at10 = u;
  });
  CHECK(res.outcome == EvolutionOutcome::kCompleted);
  CHECK(scattering_cauchy_difference(at5, 5.0, at10, 10.0) < 1e-3);

  const GroundState q = solve_petviashvili(make_grid(1, 512, 16.0), 1e-12, 500);
  cfg.mu = -1.0;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  cfg.stride = 1000;
  Field s1 = q.field;
  Field s2 = q.field;
  evolve(q.field, cfg, [&](double t, const Field& u) {
    if (std::abs(t - 1.0) < 1e-9) s1 = u;
    if (std::abs(t - 2.0) < 1e-9) s2 = u;
  });
  CHECK(scattering_cauchy_difference(s1, 1.0, s2, 2.0) > 0.1);
}

TEST_CASE("admissible pairs and Strichartz norms") {
  CHECK(admissible(4, INFINITY, 1));
  CHECK(admissible(8, 4, 1));
  CHECK(admissible(6, 6, 1));
  CHECK_FALSE(admissible(2, INFINITY, 2));
  CHECK(admissible(4, 4, 2));
  CHECK_FALSE(admissible(4, 3, 1));
  CHECK_FALSE(admissible(2, 2, 1));

  const GridSpec g = make_grid(1, 512, 16.0);
  const GroundState q = solve_petviashvili(g, 1e-12, 500);
  EvolutionConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 4.0;
  cfg.stride = 50;
  std::vector<double> times;
  std::vector<Field> states;
  evolve(q.field, cfg, [&](double t, const Field& u) {
    times.push_back(t);
    states.push_back(u);
  });
  auto norm_to = [&](double T) {
    std::vector<double> ts;
    std::vector<Field> us;
    for (std::size_t i = 0; i < times.size() && times[i] <= T + 1e-9; ++i) {
      ts.push_back(times[i]);
      us.push_back(states[i]);
    }
    return strichartz_norm(ts, us, 6.0, 6.0);
  };
  const double slope = std::log(norm_to(4.0) / norm_to(0.5)) / std::log(8.0);
  CHECK(slope == doctest::Approx(1.0 / 6.0).epsilon(0.02));
}

TEST_CASE("concentration estimates") {
  const GridSpec g = make_grid(1, 1024, 16.0);
  const GroundState q = closed_form_1d(g);
  for (double frac : {0.01, 0.03, 0.1}) {
    const auto c = concentration_estimates(q.field, frac * q.mass_sq);
    CHECK(std::abs(c.x[0]) < 1e-12);
    CHECK(std::abs(c.xi[0]) < 1e-12);
    CHECK(c.N >= 0.5);
    CHECK(c.N <= 8.0);
  }
  const double eta = 0.05 * q.mass_sq;
  const auto base = concentration_estimates(q.field, eta);
  const double xi0 = g.wavenumber(20);
  const auto boosted = concentration_estimates(galilean_boost(q.field, {xi0, 0.0}, 0.0), eta);
  CHECK(std::abs(boosted.xi[0] - base.xi[0] - xi0) <= g.dk());
  CHECK(boosted.N == base.N);

  const auto scaled = concentration_estimates(rescale(q.field, 4.0), eta);
  CHECK(scaled.N / base.N == 4.0);
  CHECK(std::abs(scaled.x[0]) < 1e-12);

  CHECK_THROWS_AS(concentration_estimates(q.field, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(concentration_estimates(q.field, 2.0 * q.mass_sq), std::invalid_argument);
}
