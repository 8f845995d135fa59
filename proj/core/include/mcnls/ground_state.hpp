#pragma once

#include <optional>
#include <stdexcept>

#include "mcnls/grid.hpp"

namespace mcnls {

/// Positive radial solution of Delta Q + Q^{1+4/d} = Q sampled on a grid.
struct GroundState {
  Field field;
  double mass_sq = 0.0;
  /// ((d+2)/d) ||Q||_2^{-4/d}
  double gn_constant = 0.0;
  /// ||Delta Q + Q^{1+4/d} - Q||_2 / ||Q||_2
  double residual = 0.0;
  int iterations = 0;
};

/// Thrown when the renormalized iteration fails; carries the last
/// successive-iterate difference.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// Q(x) = 3^{1/4} sech^{1/2}(2x). The residual uses the exact second
/// derivative Q'' = Q (1 - 3 sech^2(2x)) at the nodes. Requires d = 1, L >= 10.
GroundState closed_form_1d(const GridSpec& grid);

/// Residual with Delta taken spectrally on the periodic box. For a profile
/// that is not periodic this includes the derivative jump at x = +-L.
double spectral_residual(const Field& q);

/// Petviashvili iteration Q <- S^gamma (1 - Delta)^{-1} Q^{1+4/d},
/// S = <Q, (1-Delta) Q> / <Q, Q^{1+4/d}>, gamma = r / (r - 1), r = 1 + 4/d.
/// Stops once the L2 distance between successive iterates drops below tol.
GroundState solve_petviashvili(const GridSpec& grid, double tol = 1e-12,
                               int max_iter = 500,
                               std::optional<Field> initial = std::nullopt);

/// Relative residuals of the identities obtained by pairing the profile
/// equation with Q and with x . grad Q (K = ||grad Q||^2, P = \int Q^{2+4/d},
/// M = ||Q||^2):
///   energy:   -K + P - M = 0
///   dilation: (d-2)/2 K - d^2/(2(d+2)) P + d/2 M = 0
/// Both are divided by M.
struct PohozaevResiduals {
  double energy = 0.0;
  double dilation = 0.0;
};
PohozaevResiduals pohozaev_check(const GroundState& q);

/// \int |f|^{2(d+2)/d} divided by ((d+2)/d) (||f|| / ||Q||)^{4/d} \int |grad f|^2.
double gn_ratio(const Field& f, const GroundState& q);

/// Translates by a whole number of grid cells so that max |f| sits at x = 0.
Field center_on_peak(const Field& f);

}  // namespace mcnls
