#include "mcnls/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "mcnls/projections.hpp"

namespace mcnls {
namespace {

using boost::math::quadrature::gauss;
constexpr double kPi = std::numbers::pi;

double bump_second(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  // bump(s) = a / (a + b), a = exp(-1/(2 - s)), b = exp(-1/(s - 1)).
  // Rewritten with t = s - 1 in (0, 1): a = exp(-1/(1 - t)), b = exp(-1/t).
  const double t = s - 1.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  const double da = -a / ((1.0 - t) * (1.0 - t));
  const double db = b / (t * t);
  const double w = 1.0 / ((1.0 - t) * (1.0 - t)) + 1.0 / (t * t);
  const double dw = 2.0 / std::pow(1.0 - t, 3) - 2.0 / std::pow(t, 3);
  const double ab = a * b;
  const double dab = ab * (-1.0 / ((1.0 - t) * (1.0 - t)) + 1.0 / (t * t));
  const double p = -ab * w;
  const double dp = -dab * w - ab * dw;
  const double sum = a + b;
  return (dp * sum - 2.0 * p * (da + db)) / (sum * sum * sum);
}

// bump(|s| - shift) with the plateau extended to every |s| <= shift + 1.
double plateau(double s, double shift) {
  const double t = std::abs(s) - shift;
  return t <= 1.0 ? 1.0 : bump(t);
}

double plateau_derivative(double s, double shift) {
  const double t = std::abs(s) - shift;
  if (t <= 1.0) return 0.0;
  return bump_derivative(t) * (s < 0.0 ? -1.0 : 1.0);
}

// Integrates f over [lo, hi], splitting into pieces no longer than `piece`.
template <class F>
double integrate_pieces(F&& f, double lo, double hi, double piece) {
  if (!(hi > lo)) return 0.0;
  const int count = std::max(1, static_cast<int>(std::ceil((hi - lo) / piece - 1e-12)));
  const double width = (hi - lo) / count;
  double total = 0.0;
  for (int k = 0; k < count; ++k) {
    total += gauss<double, 30>::integrate(f, lo + k * width, lo + (k + 1) * width);
  }
  return total;
}

// Integral over the real line of f, where f is smooth between the sorted
// breakpoints and vanishes outside [front, back].
template <class F>
double integrate_breaks(F&& f, std::vector<double> breaks, double lo, double hi) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = std::max(breaks[i], lo);
    const double b = std::min(breaks[i + 1], hi);
    if (b - a <= 1e-15) continue;
    // Pieces of length above one lie on plateaus of both factors.
    total += integrate_pieces(f, a, b, b - a > 1.0 + 1e-9 ? b - a : 0.25);
  }
  return total;
}

// sin^2 substitution r = a + (b - a) sin^2(pi v / 2), v in [0, 1]: removes
// square-root endpoint behaviour of the integrand.
template <class F>
double integrate_smoothed(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  auto g = [&](double v) {
    const double s = std::sin(0.5 * kPi * v);
    const double jac = (b - a) * kPi * s * std::cos(0.5 * kPi * v);
    return f(a + (b - a) * s * s) * jac;
  };
  return gauss<double, 30>::integrate(g, 0.0, 0.5) + gauss<double, 30>::integrate(g, 0.5, 1.0);
}

// Cubic Hermite basis integrals over [0, t].
struct HermiteIntegrals {
  double h00, h10, h01, h11;
};
HermiteIntegrals hermite_integrals(double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  return {t4 / 2 - t3 + t, t4 / 4 - 2 * t3 / 3 + t2 / 2, -t4 / 2 + t3, t4 / 4 - t3 / 3};
}

}  // namespace

WeightFamily WeightFamily::correlation(int dim, double M, double R) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("weights: dimension must be 1 or 2");
  if (!(M >= 4.0) || !std::isfinite(M)) throw std::invalid_argument("weights: M must be at least 4");
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("weights: R must be positive");
  WeightFamily w;
  w.kind_ = Kind::kCorrelation;
  w.dim_ = dim;
  w.M_ = M;
  w.R_ = R;
  w.support_ = 2.0 * M;
  w.tabulate(dim == 1 ? 0.005 : 0.01);
  return w;
}

WeightFamily WeightFamily::centered(double R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("weights: R must be positive");
  WeightFamily w;
  w.kind_ = Kind::kCentered;
  w.dim_ = 1;
  w.M_ = 1.5;
  w.R_ = R;
  w.support_ = 2.0;
  w.tabulate(0.0005);
  return w;
}

WeightFamily build_weights(int dim, double M, double R) {
  return WeightFamily::correlation(dim, M, R);
}

double WeightFamily::varphi(double r) const {
  return kind_ == Kind::kCentered ? bump(r) : plateau(r, M_ - 2.0);
}

double WeightFamily::chi(double r) const {
  return kind_ == Kind::kCentered ? bump(2.0 * r) : plateau(r, M_ - 3.0);
}

double WeightFamily::phi_direct(double r) const {
  r = std::abs(r);
  if (r >= support_) return 0.0;
  if (kind_ == Kind::kCentered) return bump(r) - 1.5 * bump_derivative(r);
  const double M = M_;
  auto vp = [M](double s) { return plateau(s, M - 2.0); };
  if (dim_ == 1) {
    auto f = [&](double s) { return vp(r - s) * vp(s); };
    const double lo = std::max(-M, r - M), hi = std::min(M, r + M);
    return integrate_breaks(f, {-(M - 1), M - 1, r - M + 1, r + M - 1}, lo, hi) / (2.0 * M);
  }
  // d = 2: polar coordinates around the origin, x = (r, 0).
  const double norm = 1.0 / (kPi * M * M);
  if (r < 1e-12) {
    auto f = [&](double s) { return 2.0 * kPi * s * vp(s) * vp(s); };
    return integrate_breaks(f, {M - 1}, 0.0, M) * norm;
  }
  const double rho = r;
  auto theta_at = [rho](double s, double c) {
    const double arg = (s * s + rho * rho - c * c) / (2.0 * s * rho);
    return std::acos(std::clamp(arg, -1.0, 1.0));
  };
  auto big_theta = [&](double s) {
    if (s <= 0.0) return 2.0 * kPi * vp(rho);
    const double t0 = theta_at(s, M - 1), t1 = theta_at(s, M);
    auto inner = [&](double th) {
      return vp(std::sqrt(s * s + rho * rho - 2.0 * s * rho * std::cos(th)));
    };
    return 2.0 * (t0 + integrate_pieces(inner, t0, t1, (t1 - t0) / 2.0 + 1e-300));
  };
  auto outer = [&](double s) { return s * vp(s) * big_theta(s); };
  std::vector<double> br = {0.0, M - 1, M, std::abs(rho - (M - 1)), std::abs(rho - M),
                            rho + M - 1, rho + M};
  std::sort(br.begin(), br.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = std::max(br[i], 0.0), b = std::min(br[i + 1], M);
    if (b - a > 1e-14) total += integrate_smoothed(outer, a, b);
  }
  return total * norm;
}

double WeightFamily::phi_prime_direct(double r) const {
  const double sign = r < 0.0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r >= support_) return 0.0;
  if (kind_ == Kind::kCentered) return sign * (bump_derivative(r) - 1.5 * bump_second(r));
  const double M = M_;
  auto vp = [M](double s) { return plateau(s, M - 2.0); };
  auto dvp = [M](double s) { return plateau_derivative(s, M - 2.0); };
  if (dim_ == 1) {
    auto f = [&](double s) { return dvp(r - s) * vp(s); };
    const double lo = std::max(-M, r - M), hi = std::min(M, r + M);
    return sign * integrate_breaks(f, {-(M - 1), M - 1, r - M + 1, r + M - 1}, lo, hi) / (2.0 * M);
  }
  if (r < 1e-12) return 0.0;
  const double rho = r;
  auto theta_at = [rho](double s, double c) {
    const double arg = (s * s + rho * rho - c * c) / (2.0 * s * rho);
    return std::acos(std::clamp(arg, -1.0, 1.0));
  };
  auto d_theta = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double t0 = theta_at(s, M - 1), t1 = theta_at(s, M);
    auto inner = [&](double th) {
      const double dist = std::sqrt(s * s + rho * rho - 2.0 * s * rho * std::cos(th));
      return dvp(dist) * (rho - s * std::cos(th)) / dist;
    };
    return 2.0 * integrate_pieces(inner, t0, t1, (t1 - t0) / 2.0 + 1e-300);
  };
  auto outer = [&](double s) { return s * vp(s) * d_theta(s); };
  std::vector<double> br = {0.0, M - 1, M, std::abs(rho - (M - 1)), std::abs(rho - M),
                            rho + M - 1, rho + M};
  std::sort(br.begin(), br.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = std::max(br[i], 0.0), b = std::min(br[i + 1], M);
    if (b - a > 1e-14) total += integrate_smoothed(outer, a, b);
  }
  return sign * total / (kPi * M * M);
}

void WeightFamily::tabulate(double step) {
  const int cells = static_cast<int>(std::ceil(support_ / step));
  step_ = support_ / cells;
  phi_.resize(cells + 1);
  dphi_.resize(cells + 1);
  cumulative_.assign(cells + 1, 0.0);
  for (int i = 0; i <= cells; ++i) {
    phi_[i] = i == cells ? 0.0 : phi_direct(i * step_);
    dphi_[i] = (i == 0 || i == cells) ? 0.0 : phi_prime_direct(i * step_);
  }
  phi_second_zero_ = phi_second(0.0);
  const HermiteIntegrals full = hermite_integrals(1.0);
  for (int i = 0; i < cells; ++i) {
    cumulative_[i + 1] = cumulative_[i] + step_ * (phi_[i] * full.h00 + step_ * dphi_[i] * full.h10 +
                                                   phi_[i + 1] * full.h01 +
                                                   step_ * dphi_[i + 1] * full.h11);
  }
}

double WeightFamily::phi(double r) const {
  r = std::abs(r);
  if (r >= support_) return 0.0;
  const int i = std::min(static_cast<int>(r / step_), static_cast<int>(phi_.size()) - 2);
  const double t = r / step_ - i;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * phi_[i] + (t3 - 2 * t2 + t) * step_ * dphi_[i] +
         (-2 * t3 + 3 * t2) * phi_[i + 1] + (t3 - t2) * step_ * dphi_[i + 1];
}

double WeightFamily::phi_prime(double r) const {
  const double sign = r < 0.0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r >= support_) return 0.0;
  const int i = std::min(static_cast<int>(r / step_), static_cast<int>(phi_.size()) - 2);
  const double t = r / step_ - i;
  const double t2 = t * t;
  return sign * ((6 * t2 - 6 * t) * phi_[i] / step_ + (3 * t2 - 4 * t + 1) * dphi_[i] +
                 (-6 * t2 + 6 * t) * phi_[i + 1] / step_ + (3 * t2 - 2 * t) * dphi_[i + 1]);
}

double WeightFamily::phi_second(double r) const {
  r = std::abs(r);
  if (r >= support_) return 0.0;
  if (kind_ == Kind::kCentered) {
    // phi'' = bump'' - 1.5 bump'''; bump''' by a central difference of bump''.
    const double h = 1e-5;
    return bump_second(r) - 1.5 * (bump_second(r + h) - bump_second(r - h)) / (2 * h);
  }
  const double M = M_;
  if (dim_ == 1) {
    auto dvp = [M](double s) { return plateau_derivative(s, M - 2.0); };
    auto f = [&](double s) { return dvp(r - s) * dvp(s); };
    const double lo = std::max(-M, r - M), hi = std::min(M, r + M);
    return integrate_breaks(f, {-(M - 1), M - 1, r - M + 1, r + M - 1}, lo, hi) / (2.0 * M);
  }
  const double h = 1e-4;
  if (r < h) return (phi_prime_direct(h) - phi_prime_direct(-h)) / (2 * h);
  return (phi_prime_direct(r + h) - phi_prime_direct(r - h)) / (2 * h);
}

double WeightFamily::phi_integral(double r) const {
  const double sign = r < 0.0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r >= support_) return sign * cumulative_.back();
  const int i = std::min(static_cast<int>(r / step_), static_cast<int>(phi_.size()) - 2);
  const HermiteIntegrals p = hermite_integrals(r / step_ - i);
  return sign * (cumulative_[i] + step_ * (phi_[i] * p.h00 + step_ * dphi_[i] * p.h10 +
                                           phi_[i + 1] * p.h01 + step_ * dphi_[i + 1] * p.h11));
}

double WeightFamily::psi(double r) const {
  if (std::abs(r) < 1e-12) return phi_[0];
  return phi_integral(r) / r;
}

double WeightFamily::psi_prime(double r) const {
  if (std::abs(r) < 1e-4) return phi_second_zero_ * r / 3.0;
  return (phi(r) - psi(r)) / r;
}

}  // namespace mcnls

namespace mcnls {
namespace {

InvariantCheck upper(std::string name, double value, double bound, double tol = 1e-10) {
  return {std::move(name), value, bound, value <= bound + tol, false};
}

double fd_derivative(const std::function<double(double)>& f, double r, double h) {
  return (8.0 * (f(r + h) - f(r - h)) - (f(r + 2 * h) - f(r - 2 * h))) / (12.0 * h);
}

}  // namespace

bool invariants_pass(const std::vector<InvariantCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const InvariantCheck& c) { return c.ok || c.informational; });
}

std::vector<InvariantCheck> check_invariants(const WeightFamily& w, int samples_per_unit) {
  if (samples_per_unit < 1) throw std::invalid_argument("check_invariants: samples_per_unit must be positive");
  const double M = w.M();
  const double reach = 1.5 * w.support();
  const int count = static_cast<int>(std::ceil(reach * samples_per_unit));
  std::vector<double> rs(count + 1);
  for (int k = 0; k <= count; ++k) rs[k] = reach * k / count;

  double sup_phi = 0, tail = 0, odd = 0, kernel = 0, decay = 0, identity = 0;
  double dphi_signed = -1e300, dphi_abs = 0, d2_signed = -1e300, d2_abs = 0, rise = 0;
  const auto psi = [&w](double r) { return w.psi(r); };
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const double r = rs[k];
    const double phi = w.phi(r);
    sup_phi = std::max(sup_phi, std::abs(phi));
    if (r > w.support()) tail = std::max(tail, std::abs(phi));
    const double a = r * w.psi(r);
    odd = std::max(odd, std::abs(a + (-r) * w.psi(-r)));
    kernel = std::max(kernel, a);
    if (r > 0) {
      decay = std::max(decay, w.psi(r) - 2.0 * M / r);
      const double h = 1e-3;
      if (r > 2 * h) identity = std::max(identity, std::abs(r * fd_derivative(psi, r, h) - (phi - w.psi(r))));
    }
    const double d1 = w.phi_prime(r);
    dphi_signed = std::max(dphi_signed, d1);
    dphi_abs = std::max(dphi_abs, std::abs(d1));
    // phi'' is evaluated by quadrature on demand; a tenth of the samples
    // resolves its extrema.
    if (r <= w.support() && k % 10 == 0) {
      const double d2 = w.phi_second(r);
      d2_signed = std::max(d2_signed, d2);
      d2_abs = std::max(d2_abs, std::abs(d2));
    }
    if (k > 0) rise = std::max(rise, phi - w.phi(rs[k - 1]));
  }

  std::vector<InvariantCheck> out;
  InvariantCheck bounded = upper("phi_bounded", sup_phi, 1.0);
  bounded.ok = bounded.ok && tail == 0.0;
  out.push_back(bounded);
  InvariantCheck odd_check = upper("kernel_odd", kernel, 2.0 * M);
  odd_check.ok = odd_check.ok && odd <= 1e-12;
  out.push_back(odd_check);
  out.push_back(upper("psi_decay", decay, 0.0));
  out.push_back(upper("psi_identity", identity, 0.0));
  InvariantCheck first = upper("phi_prime", std::max(dphi_signed, dphi_abs), 1.0 / M);
  out.push_back(first);
  out.push_back(upper("phi_second", d2_signed, 1.0 / M));
  out.push_back(upper("phi_decreasing", rise, 0.0));

  // chi is 1 where it is nonzero only inside the varphi plateau, so the
  // overlap at x = y reduces to moments of chi.
  const double inner = w.kind() == WeightFamily::Kind::kCentered ? 1.0 : M - 1.0;
  const int d = w.dim();
  auto moment = [&](int power) {
    auto f = [&](double r) {
      const double c = std::pow(w.chi(r), power) * w.varphi(r);
      return d == 1 ? 2.0 * c : 2.0 * std::numbers::pi * r * c;
    };
    double total = 0.0;
    const int pieces = static_cast<int>(std::ceil(inner * 8));
    for (int k = 0; k < pieces; ++k) {
      total += boost::math::quadrature::gauss<double, 30>::integrate(f, inner * k / pieces,
                                                                    inner * (k + 1) / pieces);
    }
    return total;
  };
  const double ball = d == 1 ? 2.0 * M : std::numbers::pi * M * M;
  if (d == 1) {
    const double overlap = moment(6) / ball;
    const double bound = (M - 2.0) / M;
    out.push_back({"plateau_overlap", overlap, bound, overlap >= bound - 1e-10, false});
  } else {
    const double overlap = moment(1) / ball;
    const double bound = (M - 1.0) / M;
    out.push_back({"plateau_overlap", overlap, bound, overlap >= bound - 1e-10, false});
    const double corrected = std::pow((M - 2.0) / M, d);
    out.push_back({"plateau_overlap_corrected", overlap, corrected, overlap >= corrected - 1e-10, true});
  }
  InvariantCheck abs_second = upper("phi_second_abs", d2_abs, 1.0 / M);
  abs_second.informational = true;
  out.push_back(abs_second);
  return out;
}

WeightConditionReport weight_conditions_check(const WeightFamily& w, std::span<const double> times,
                                              std::span<const double> values,
                                              const WeightConditionOptions& opts) {
  if (times.size() != values.size() || times.empty()) {
    throw std::invalid_argument("weight_conditions_check: times and values must be nonempty and equal length");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]) || !(values[i] > 0.0)) {
      throw std::invalid_argument("weight_conditions_check: entries must be finite with N > 0");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("weight_conditions_check: times must be strictly increasing");
    }
  }
  if (opts.samples_per_unit < 1) throw std::invalid_argument("weight_conditions_check: samples_per_unit must be positive");

  const int d = w.dim();
  const double R = w.R();
  const double M = w.M();
  WeightConditionReport rep;
  rep.sup_a_bound = 2.0 * M * R;
  rep.sup_x_grad_a_bound = 6.0 * M * R;

  const double reach = w.support() + 2.0;
  const int radial = static_cast<int>(std::ceil(reach * opts.samples_per_unit));
  const int angles = d == 1 ? 1 : 16;
  const double fd = 1e-6;

  for (const double N : values) {
    const double scale = R / N;
    auto a_component = [&](const Point& x, int j) {
      const double norm = d == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
      double v = w.psi(norm * N / R) * x[j] * N;
      if (opts.perturbation) v += opts.perturbation(x);
      return v;
    };
    for (int k = 1; k <= radial; ++k) {
      const double r = reach * k / radial;
      for (int l = 0; l < 2 * angles; ++l) {
        const double th = std::numbers::pi * (l + 0.5) / angles;
        const Point x = d == 1 ? Point{l == 0 ? r * scale : -r * scale, 0.0}
                               : Point{r * scale * std::cos(th), r * scale * std::sin(th)};
        if (d == 1 && l > 1) break;
        const Point mirror{-x[0], -x[1]};
        const double xn = r * scale;
        for (int j = 0; j < d; ++j) {
          const double aj = a_component(x, j);
          double amag = 0.0;
          for (int i = 0; i < d; ++i) amag += std::pow(a_component(x, i), 2);
          rep.sup_a = std::max(rep.sup_a, std::sqrt(amag));
          rep.odd_residual = std::max(rep.odd_residual, std::abs(aj + a_component(mirror, j)));
          // Analytic gradient of the radial part plus a difference quotient of
          // the perturbation.
          const double psi = w.psi(r), dpsi = w.psi_prime(r);
          double grad_sq = 0.0;
          for (int i = 0; i < d; ++i) {
            const double xhat_i = x[i] / xn, xhat_j = x[j] / xn;
            double g = N * ((i == j ? psi : 0.0) + r * dpsi * xhat_i * xhat_j);
            if (opts.perturbation) {
              Point p = x, m = x;
              const double step = fd * std::max(1.0, xn);
              p[i] += step;
              m[i] -= step;
              g += (opts.perturbation(p) - opts.perturbation(m)) / (2.0 * step);
            }
            grad_sq += g * g;
          }
          rep.sup_x_grad_a = std::max(rep.sup_x_grad_a, xn * std::sqrt(grad_sq));
        }
      }
    }
  }

  // d_t a_j = x_j N' phi(|x| N / R), so ||d_t a_j||_1 = |N'| (R/N)^{d+1} c_d \int phi r^d dr
  // with c_1 = 2 and c_2 = \int |cos| = 4.
  const double cd = d == 1 ? 2.0 : 4.0;
  double radial_moment = 0.0;
  {
    auto f = [&](double r) { return w.phi(r) * std::pow(r, d); };
    const int pieces = static_cast<int>(std::ceil(w.support() * 4));
    for (int k = 0; k < pieces; ++k) {
      radial_moment += boost::math::quadrature::gauss<double, 30>::integrate(
          f, w.support() * k / pieces, w.support() * (k + 1) / pieces);
    }
  }
  const double ball_moment = cd * std::pow(2.0 * M, d + 1) / (d + 1);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double slope = (values[i + 1] - values[i]) / (times[i + 1] - times[i]);
    const double n_min = std::min(values[i], values[i + 1]);
    const double factor = std::abs(slope) * std::pow(R / n_min, d + 1);
    rep.dt_l1 = std::max(rep.dt_l1, factor * cd * radial_moment);
    rep.dt_l1_bound = std::max(rep.dt_l1_bound, factor * ball_moment);
  }

  rep.sup_ok = rep.sup_a <= rep.sup_a_bound * (1 + 1e-12);
  rep.grad_ok = rep.sup_x_grad_a <= rep.sup_x_grad_a_bound * (1 + 1e-12);
  rep.odd_ok = rep.odd_residual <= opts.odd_tolerance;
  rep.dt_ok = rep.dt_l1 <= rep.dt_l1_bound * (1 + 1e-12);
  return rep;
}

}  // namespace mcnls
