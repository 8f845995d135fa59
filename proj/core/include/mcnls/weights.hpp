#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mcnls/grid.hpp"

namespace mcnls {

/// Radial Morawetz profiles. Two constructions are available:
///
/// * correlation(d, M, R): varphi(r) = bump(r - M + 2) is 1 on r <= M-1 and 0
///   beyond M; phi = varphi * varphi / (2M) in 1D or / (pi M^2) in 2D;
///   psi(r) = (1/r) \int_0^r phi; chi(r) = bump(r - M + 3).
/// * centered(R): the 1D profile with psi = 1 on [0,1] and psi = 3/r beyond 2,
///   built from phi = bump(r) - (3/2) bump'(r) >= 0 so that (r psi)' = phi.
///
/// phi and phi' are tabulated on [0, 2M] (or [0, 2]) and interpolated with
/// cubic Hermite polynomials; psi uses the exact integral of the interpolant.
class WeightFamily {
 public:
  enum class Kind { kCorrelation, kCentered };

  /// Throws std::invalid_argument unless d is 1 or 2, M >= 4 and R > 0.
  static WeightFamily correlation(int dim, double M, double R);
  static WeightFamily centered(double R);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double M() const { return M_; }
  double R() const { return R_; }

  double varphi(double r) const;
  double chi(double r) const;

  double phi(double r) const;
  double phi_prime(double r) const;
  /// Second radial derivative, evaluated by quadrature (not tabulated).
  double phi_second(double r) const;
  double psi(double r) const;
  double psi_prime(double r) const;
  /// \int_0^r phi.
  double phi_integral(double r) const;

  /// Radius beyond which phi vanishes.
  double support() const { return support_; }
  /// sup_r psi(r) r, i.e. \int_0^inf phi: the sup of |a(z)| / R.
  double kernel_sup() const { return phi_integral(support_); }

  /// phi evaluated by direct quadrature of its defining integral (the
  /// interpolation tables are filled from this).
  double phi_direct(double r) const;
  double phi_prime_direct(double r) const;

 private:
  WeightFamily() = default;
  void tabulate(double step);

  Kind kind_ = Kind::kCorrelation;
  int dim_ = 1;
  double M_ = 0.0;
  double R_ = 1.0;
  double support_ = 0.0;
  double step_ = 0.0;
  double phi_second_zero_ = 0.0;
  std::vector<double> phi_;
  std::vector<double> dphi_;
  std::vector<double> cumulative_;
};

WeightFamily build_weights(int dim, double M, double R);

struct InvariantCheck {
  std::string name;
  double value = 0.0;  ///< measured quantity
  double bound = 0.0;  ///< value it is compared against
  bool ok = false;
  /// Reported alongside the required checks but not part of the verdict.
  bool informational = false;
};

bool invariants_pass(const std::vector<InvariantCheck>& checks);

/// Dense-sampling checks of the eight profile properties:
///   phi_bounded        |phi| <= 1, phi = 0 beyond 2M
///   kernel_odd         r psi(r) odd and bounded by 2M
///   psi_decay          psi(r) <= 2M / r
///   psi_identity       r psi' = phi - psi, psi' by finite differences of psi
///   phi_prime          phi' <= 1/M and |phi'| <= 1/M
///   phi_second         phi'' <= 1/M
///   phi_decreasing     phi nonincreasing in r
///   plateau_overlap    (1/2M) \int chi^6 varphi >= (M-2)/M in 1D,
///                      (1/(omega_d M^d)) \int chi varphi >= (M-1)/M in 2D
/// plus informational rows for |phi''| <= 1/M and the ((M-2)/M)^d overlap.
std::vector<InvariantCheck> check_invariants(const WeightFamily& w, int samples_per_unit = 200);

/// Time-dependent Morawetz potential a_j(t,x) = psi(|x| N(t)/R) x_j N(t)
/// with N piecewise linear through (times, values).
struct WeightConditionReport {
  double sup_a = 0.0;
  double sup_a_bound = 0.0;     ///< sup_r psi(r) r * R
  double sup_x_grad_a = 0.0;    ///< sup |x| |grad a_j|
  double sup_x_grad_a_bound = 0.0;
  double odd_residual = 0.0;    ///< sup |a_j(x) + a_j(-x)|
  double dt_l1 = 0.0;           ///< sup_t || d_t a_j ||_{L^1}, d = 2 only
  double dt_l1_bound = 0.0;     ///< (4/3) (2MR)^3 sup |N'| / N^3
  bool sup_ok = false;
  bool grad_ok = false;
  bool odd_ok = false;
  bool dt_ok = false;
  bool all_ok() const { return sup_ok && grad_ok && odd_ok && dt_ok; }
};

struct WeightConditionOptions {
  /// Sample points per unit of r = |x| N / R.
  int samples_per_unit = 16;
  double odd_tolerance = 1e-10;
  /// Added to every a_j before the checks (negative controls).
  std::function<double(const Point&)> perturbation;
};

WeightConditionReport weight_conditions_check(const WeightFamily& w,
                                              std::span<const double> times,
                                              std::span<const double> values,
                                              const WeightConditionOptions& opts = {});

}  // namespace mcnls
