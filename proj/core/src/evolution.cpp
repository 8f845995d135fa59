#include "mcnls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "grid_internal.hpp"
#include "mcnls/observables.hpp"

namespace mcnls {
namespace {

constexpr double kBoundaryWarn = 1e-8;

bool finite(const std::vector<Complex>& v) {
  return std::all_of(v.begin(), v.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

// Split-step stages on raw sample arrays.
class Propagator {
 public:
  Propagator(const GridSpec& grid, double mu, bool dealias)
      : grid_(grid), mu_(mu), k2_(grid.size()), keep_(grid.size(), 1.0) {
    const double cut = (2.0 / 3.0) * std::abs(grid.wavenumber(grid.n() / 2));
    for (std::size_t i = 0; i < k2_.size(); ++i) {
      k2_[i] = detail::wavenumber_sq(grid, i);
      const Point k = grid.frequency(i);
      if (dealias && (std::abs(k[0]) > cut || std::abs(k[1]) > cut)) keep_[i] = 0.0;
    }
  }

  std::vector<Complex> to_modes(const std::vector<Complex>& u) const {
    return detail::forward(grid_, u);
  }

  double kinetic(const std::vector<Complex>& modes) const {
    double s = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) s += k2_[i] * std::norm(modes[i]);
    return s * grid_.spectral_cell();
  }

  std::vector<Complex> free_flow(std::vector<Complex> modes, double tau) const {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      modes[i] *= keep_[i] * std::exp(Complex(0.0, -k2_[i] * tau));
    }
    return detail::inverse(grid_, modes);
  }

  void linear(std::vector<Complex>& u, double tau) const {
    u = free_flow(to_modes(u), tau);
  }

  struct NonlinearStats {
    double max_amp = 0.0;
    double potential = 0.0;
  };

  NonlinearStats nonlinear(std::vector<Complex>& u, double tau) const {
    const int dim = grid_.dim();
    NonlinearStats st;
    double pot = 0.0;
    for (auto& v : u) {
      const double rho = std::norm(v);
      const double w = dim == 1 ? rho * rho : rho;
      st.max_amp = std::max(st.max_amp, rho);
      pot += w * rho;
      v *= std::exp(Complex(0.0, -mu_ * w * tau));
    }
    st.max_amp = std::sqrt(st.max_amp);
    st.potential = pot * grid_.cell_volume();
    return st;
  }

 private:
  GridSpec grid_;
  double mu_;
  std::vector<double> k2_;
  std::vector<double> keep_;
};

// Median of a discrete density laid out along sorted abscissae, with the
// cumulative distribution interpolated linearly between nodes.
double weighted_median(const std::vector<double>& xs, const std::vector<double>& w) {
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) return 0.0;
  const double half = 0.5 * total;
  double before = 0.0;
  double prev_c = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double c = before + 0.5 * w[i];
    if (c >= half) {
      if (i == 0 || c == prev_c) return xs[i];
      const double s = (half - prev_c) / (c - prev_c);
      return xs[i - 1] + s * (xs[i] - xs[i - 1]);
    }
    before += w[i];
    prev_c = c;
  }
  return xs.back();
}

// Marginal along `axis` of a density on an n^d lattice, reordered so that
// `coord(m)` increases.
std::pair<std::vector<double>, std::vector<double>> marginal(
    const GridSpec& grid, const std::vector<double>& density, int axis,
    bool fft_order) {
  const int n = grid.n();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < density.size(); ++i) {
    const std::size_t idx = grid.dim() == 1 ? i : (axis == 0 ? i / n : i % n);
    w[idx] += density[i];
  }
  std::vector<double> xs(n);
  std::vector<double> ws(n);
  for (int j = 0; j < n; ++j) {
    if (fft_order) {
      const int m = (j + n / 2) % n;  // ascending wavenumber
      xs[j] = grid.wavenumber(m);
      ws[j] = w[m];
    } else {
      xs[j] = grid.coordinate(j);
      ws[j] = w[j];
    }
  }
  return {xs, ws};
}

DiagnosticRecord make_record(const Propagator& prop, const GridSpec& grid,
                             const std::vector<Complex>& u, double t, double mu,
                             double scat, double eta_fraction) {
  Field f(grid, u);
  DiagnosticRecord r;
  r.t = t;
  r.mass = mass(f);
  r.kinetic = prop.kinetic(prop.to_modes(u));
  r.potential = potential(f);
  r.energy = 0.5 * r.kinetic + mu * grid.dim() / (2.0 * (grid.dim() + 2)) * r.potential;
  r.variance = variance(f);
  r.momentum = momentum(f);
  r.scat_accum = scat;
  if (r.mass > 0.0) {
    const auto c = concentration_estimates(f, eta_fraction * r.mass);
    r.N_est = c.N;
    r.xi = c.xi;
    r.x = c.x;
  }
  if (boundary_mass_fraction(f) > kBoundaryWarn) r.flags |= kFlagBoundaryMass;
  return r;
}

}  // namespace

void EvolutionConfig::validate() const {
  if (mu != 1.0 && mu != -1.0) throw std::invalid_argument("mu must be +1 or -1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("t_end must be nonnegative");
  }
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (adaptive && !(cfl > 0.0)) throw std::invalid_argument("cfl must be positive");
  if (!(eta_fraction > 0.0 && eta_fraction < 1.0)) {
    throw std::invalid_argument("eta_fraction must lie in (0, 1)");
  }
}

Field step_strang(const Field& f, double dt, double mu, bool dealias) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Propagator prop(f.grid(), mu, dealias);
  std::vector<Complex> u(f.values().begin(), f.values().end());
  prop.linear(u, 0.5 * dt);
  prop.nonlinear(u, dt);
  prop.linear(u, 0.5 * dt);
  return Field(f.grid(), std::move(u));
}

EvolutionResult evolve(const Field& f, const EvolutionConfig& cfg) {
  return evolve(f, cfg, nullptr);
}

EvolutionResult evolve(const Field& f, const EvolutionConfig& cfg,
                       const SnapshotObserver& observer) {
  cfg.validate();
  const GridSpec& grid = f.grid();
  if (cfg.boundary_guard && boundary_mass_fraction(f) > kBoundaryWarn) {
    throw std::invalid_argument(
        "initial data puts more than 1e-8 of its mass in the boundary annulus");
  }
  const Propagator prop(grid, cfg.mu, cfg.dealias);
  const double exponent = 4.0 / grid.dim();

  std::vector<Complex> u(f.values().begin(), f.values().end());
  std::vector<Complex> last_good = u;
  double t_good = cfg.t0;

  EvolutionResult result{DiagnosticsSeries{grid.dim(), {}}, f, cfg.t0,
                         EvolutionOutcome::kCompleted, 0, {}};
  double scat = 0.0;
  result.series.records.push_back(make_record(prop, grid, u, cfg.t0, cfg.mu, scat,
                                              cfg.eta_fraction));
  if (observer) observer(cfg.t0, f);
  const double grad0 = std::sqrt(result.series.records.front().kinetic);
  const double t_stop = cfg.t0 + cfg.t_end;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_stop));

  auto choose_dt = [&](double amp, double t) {
    double h = cfg.dt;
    if (cfg.adaptive && amp > 0.0) h = std::min(h, cfg.cfl / std::pow(amp, exponent));
    return std::min(h, t_stop - t);
  };

  double amp0 = 0.0;
  for (const auto& v : u) amp0 = std::max(amp0, std::abs(v));

  double t = cfg.t0;
  if (cfg.t_end <= 0.0) {
    result.final_state = Field(grid, u);
    return result;
  }

  double h = choose_dt(amp0, t);
  prop.linear(u, 0.5 * h);
  for (long step = 1;; ++step) {
    const auto st = prop.nonlinear(u, h);
    scat += h * st.potential;
    // uniform steps land on k dt; the adaptive clock accumulates
    t = cfg.adaptive ? t + h : std::min(cfg.t0 + step * cfg.dt, t_stop);
    result.steps = static_cast<int>(step);

    if (!finite(u)) {
      result.outcome = EvolutionOutcome::kNonFinite;
      result.message = "non-finite samples near t = " + std::to_string(t);
      result.final_state = Field(grid, last_good);
      result.final_time = t_good;
      if (!result.series.records.empty()) result.series.records.back().flags |= kFlagNonFinite;
      return result;
    }

    const bool done = t >= t_stop - eps;
    const double h_next = done ? 0.0 : choose_dt(st.max_amp, t);
    auto modes = prop.to_modes(u);
    const double grad = std::sqrt(prop.kinetic(modes));
    const bool blowup = grad >= cfg.gradient_growth_limit * grad0 ||
                        st.max_amp >= cfg.amplitude_limit;
    const bool record = done || blowup || step % cfg.stride == 0;

    if (record) {
      u = prop.free_flow(std::move(modes), 0.5 * h);
      auto rec = make_record(prop, grid, u, t, cfg.mu, scat, cfg.eta_fraction);
      if (blowup) rec.flags |= kFlagBlowupSuspected;
      result.series.records.push_back(rec);
      if (observer) observer(t, Field(grid, u));
      last_good = u;
      t_good = t;
      if (blowup) {
        result.outcome = EvolutionOutcome::kBlowupSuspected;
        result.message = "blowup suspected at t = " + std::to_string(t);
        break;
      }
      if (done) break;
      prop.linear(u, 0.5 * h_next);
    } else {
      u = prop.free_flow(std::move(modes), 0.5 * (h + h_next));
    }
    h = h_next;
  }
  result.final_state = Field(grid, std::move(u));
  result.final_time = t;
  return result;
}

VirialDeviation virial_check(const DiagnosticsSeries& series) {
  const auto& r = series.records;
  if (r.size() < 5) throw std::invalid_argument("virial_check needs at least 5 records");
  const double delta = r[1].t - r[0].t;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (std::abs((r[i].t - r[i - 1].t) - delta) > 1e-9 * std::max(1.0, std::abs(delta))) {
      throw std::invalid_argument("virial_check requires uniformly spaced records");
    }
  }
  VirialDeviation out;
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double fd = (r[i + 1].variance - 2.0 * r[i].variance + r[i - 1].variance) /
                      (delta * delta);
    out.max_abs = std::max(out.max_abs, std::abs(fd - 16.0 * r[i].energy));
    scale = std::max(scale, std::abs(16.0 * r[i].energy));
  }
  out.max_rel = scale > 0.0 ? out.max_abs / scale : INFINITY;
  return out;
}

Field free_pullback(const Field& f, double t) {
  return apply_multiplier(f, [t](const Point& k) {
    return std::exp(Complex(0.0, (k[0] * k[0] + k[1] * k[1]) * t));
  });
}

double scattering_cauchy_difference(const Field& u1, double t1, const Field& u2,
                                    double t2) {
  return lp_norm(free_pullback(u2, t2) - free_pullback(u1, t1), 2.0);
}

bool admissible(double p, double q, int dim) {
  if (!(p >= 1.0) || !(q >= 2.0)) return false;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  if (std::abs(2.0 / p - dim * (0.5 - inv_q)) > 1e-12) return false;
  if (dim == 1) return p >= 4.0;
  if (dim == 2) return p > 2.0;
  return p >= 2.0;
}

double strichartz_norm(const std::vector<double>& times, const std::vector<Field>& states,
                       double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw std::invalid_argument("p and q must be >= 1");
  if (times.size() != states.size() || times.size() < 2) {
    throw std::invalid_argument("need at least two time samples");
  }
  double sum = 0.0;
  double prev = std::pow(lp_norm(states[0], q), p);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double cur = std::pow(lp_norm(states[i], q), p);
    sum += 0.5 * (times[i] - times[i - 1]) * (prev + cur);
    prev = cur;
  }
  return std::pow(sum, 1.0 / p);
}

ConcentrationEstimate concentration_estimates(const Field& f, double eta) {
  const GridSpec& grid = f.grid();
  const double m = mass(f);
  if (!(eta > 0.0) || !(eta < m)) {
    throw std::invalid_argument("eta must lie strictly between 0 and the mass");
  }
  std::vector<double> rho(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) rho[i] = std::norm(f[i]);
  const auto modes = detail::forward(grid, f.values());
  std::vector<double> spec(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) spec[i] = std::norm(modes[i]);

  ConcentrationEstimate out;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const auto [xs, wx] = marginal(grid, rho, axis, false);
    out.x[axis] = weighted_median(xs, wx);
    const auto [ks, wk] = marginal(grid, spec, axis, true);
    out.xi[axis] = weighted_median(ks, wk);
  }

  const double cell = grid.spectral_cell();
  auto outside = [&](double N) {
    double s = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const Point k = grid.frequency(i);
      if (std::hypot(k[0] - out.xi[0], k[1] - out.xi[1]) > N) s += spec[i];
    }
    return s * cell;
  };
  // the whole lattice lies within 2 sqrt(d) k_max of any xi inside it
  const double kmax = std::abs(grid.wavenumber(grid.n() / 2));
  int j = static_cast<int>(std::floor(std::log2(grid.dk()))) - 1;
  while (outside(std::ldexp(1.0, j)) >= eta) {
    if (std::ldexp(1.0, j) > 4.0 * kmax) break;
    ++j;
  }
  out.N = std::ldexp(1.0, j);
  return out;
}

}  // namespace mcnls
