#include "mcnls/morawetz.hpp"

#include <cmath>
#include <stdexcept>

#include "fft.hpp"
#include "grid_internal.hpp"
#include "mcnls/observables.hpp"

namespace mcnls {
namespace {

void require_scale(double Ntilde) {
  if (!(Ntilde > 0.0) || !std::isfinite(Ntilde)) {
    throw std::invalid_argument("morawetz: Ntilde must be positive and finite");
  }
}

void require_dim(const Field& f, const WeightFamily& w) {
  if (f.grid().dim() != w.dim()) {
    throw std::invalid_argument("morawetz: field and weight family dimensions differ");
  }
}

// Linear convolution of node samples through a zero-padded FFT of side 2n.
// Padded index m maps to the node offset m (m < n) or m - 2n (m > n); the
// offset +-n is never a difference of two nodes and its kernel entry is zero,
// which keeps sampled odd kernels exactly odd.
class PaddedConvolver {
 public:
  explicit PaddedConvolver(const GridSpec& grid)
      : grid_(grid), rank_(grid.dim()), n_(grid.n()), n2_(2 * grid.n()) {
    padded_size_ = rank_ == 1 ? n2_ : static_cast<std::size_t>(n2_) * n2_;
  }

  std::size_t padded_size() const { return padded_size_; }

  // Node offset of a padded index along one axis, or false at the unused +-n.
  bool offset(int m, int& out) const {
    if (m == n_) return false;
    out = m < n_ ? m : m - n2_;
    return true;
  }

  // Difference vector for a padded flat index; false at unused entries.
  bool difference(std::size_t flat, Point& z) const {
    const double h = grid_.spacing();
    int o0 = 0, o1 = 0;
    if (rank_ == 1) {
      if (!offset(static_cast<int>(flat), o0)) return false;
      z = {o0 * h, 0.0};
      return true;
    }
    if (!offset(static_cast<int>(flat / n2_), o0) || !offset(static_cast<int>(flat % n2_), o1)) {
      return false;
    }
    z = {o0 * h, o1 * h};
    return true;
  }

  std::vector<Complex> transform_samples(std::span<const double> samples) const {
    std::vector<Complex> buf(padded_size_, Complex(0.0, 0.0));
    if (rank_ == 1) {
      for (int i = 0; i < n_; ++i) buf[i] = samples[i];
    } else {
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) buf[static_cast<std::size_t>(i) * n2_ + j] = samples[static_cast<std::size_t>(i) * n_ + j];
      }
    }
    detail::dft(buf, buf, rank_, n2_, detail::FftDirection::kForward);
    return buf;
  }

  std::vector<Complex> transform_kernel(std::span<const double> kernel) const {
    std::vector<Complex> buf(kernel.begin(), kernel.end());
    detail::dft(buf, buf, rank_, n2_, detail::FftDirection::kForward);
    return buf;
  }

  // (k * b)(x_i) = h^d sum_l k(x_i - x_l) b_l at the nodes.
  std::vector<double> apply(const std::vector<Complex>& kernel_hat,
                            const std::vector<Complex>& sample_hat) const {
    std::vector<Complex> buf(padded_size_);
    for (std::size_t i = 0; i < padded_size_; ++i) buf[i] = kernel_hat[i] * sample_hat[i];
    detail::dft(buf, buf, rank_, n2_, detail::FftDirection::kBackward);
    const double scale = grid_.cell_volume() / static_cast<double>(padded_size_);
    std::vector<double> out(grid_.size());
    if (rank_ == 1) {
      for (int i = 0; i < n_; ++i) out[i] = buf[i].real() * scale;
    } else {
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          out[static_cast<std::size_t>(i) * n_ + j] = buf[static_cast<std::size_t>(i) * n2_ + j].real() * scale;
        }
      }
    }
    return out;
  }

 private:
  GridSpec grid_;
  int rank_;
  int n_;
  int n2_;
  std::size_t padded_size_ = 0;
};

double dot(const GridSpec& grid, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * grid.cell_volume();
}

// Local densities of a field needed by the flux.
struct Densities {
  std::vector<double> rho;
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> stress;  // Re(conj(d_j u) d_k u), flat index j * d + k
  std::vector<double> grad_sq;
  std::vector<double> power;  // |u|^q
  std::vector<double> lap_rho;
};

Densities densities(const Field& f) {
  const int d = f.grid().dim();
  const std::size_t size = f.size();
  const auto grad = gradient(f);
  const Field lap = laplacian(f);
  const double q = critical_exponent(d);
  Densities out;
  out.rho.resize(size);
  out.grad_sq.assign(size, 0.0);
  out.power.resize(size);
  out.lap_rho.resize(size);
  out.p.assign(d, std::vector<double>(size));
  out.stress.assign(d * d, std::vector<double>(size));
  for (std::size_t i = 0; i < size; ++i) {
    const Complex u = f[i];
    out.rho[i] = std::norm(u);
    out.power[i] = std::pow(std::abs(u), q);
    for (int j = 0; j < d; ++j) {
      out.p[j][i] = std::imag(std::conj(u) * grad[j][i]);
      out.grad_sq[i] += std::norm(grad[j][i]);
      for (int k = 0; k < d; ++k) {
        out.stress[j * d + k][i] = std::real(std::conj(grad[j][i]) * grad[k][i]);
      }
    }
    out.lap_rho[i] = 2.0 * std::real(std::conj(u) * lap[i]) + 2.0 * out.grad_sq[i];
  }
  return out;
}

}  // namespace

std::vector<double> convolve_difference(const GridSpec& grid,
                                        const std::function<double(const Point&)>& kernel,
                                        std::span<const double> samples) {
  if (samples.size() != grid.size()) {
    throw std::invalid_argument("convolve_difference: sample count does not match the grid");
  }
  const PaddedConvolver conv(grid);
  std::vector<double> k(conv.padded_size(), 0.0);
  Point z{};
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (conv.difference(i, z)) k[i] = kernel(z);
  }
  return conv.apply(conv.transform_kernel(k), conv.transform_samples(samples));
}

std::vector<std::vector<double>> momentum_density(const Field& f) {
  const auto grad = gradient(f);
  std::vector<std::vector<double>> p(grad.size(), std::vector<double>(f.size()));
  for (std::size_t j = 0; j < grad.size(); ++j) {
    for (std::size_t i = 0; i < f.size(); ++i) p[j][i] = std::imag(std::conj(f[i]) * grad[j][i]);
  }
  return p;
}

double centered_action(const Field& f, double Ntilde, double R, const WeightFamily& w) {
  if (f.grid().dim() != 1 || w.dim() != 1) {
    throw std::invalid_argument("centered_action: one-dimensional fields only");
  }
  require_scale(Ntilde);
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("centered_action: R must be positive");
  const auto p = momentum_density(f);
  const GridSpec& g = f.grid();
  std::vector<double> integrand(f.size());
  for (int i = 0; i < g.n(); ++i) {
    const double x = g.coordinate(i);
    integrand[i] = w.psi(x * Ntilde / R) * x * Ntilde * p[0][i];
  }
  return detail::quadrature(g, integrand);
}

double interaction_action(const Field& f, double Ntilde, const WeightFamily& w) {
  require_scale(Ntilde);
  require_dim(f, w);
  const GridSpec& g = f.grid();
  const int d = g.dim();
  const double R = w.R();
  const auto p = momentum_density(f);
  std::vector<double> rho(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) rho[i] = std::norm(f[i]);

  const PaddedConvolver conv(g);
  const auto rho_hat = conv.transform_samples(rho);
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    std::vector<double> k(conv.padded_size(), 0.0);
    Point z{};
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (!conv.difference(i, z)) continue;
      const double r = std::hypot(z[0], z[1]) * Ntilde / R;
      k[i] = w.psi(r) * z[j] * Ntilde;
    }
    total += dot(g, p[j], conv.apply(conv.transform_kernel(k), rho_hat));
  }
  return total;
}

MorawetzReport interaction_flux(const Field& f, double Ntilde, double Ntilde_prime, double mu,
                                const WeightFamily& w) {
  require_scale(Ntilde);
  require_dim(f, w);
  if (!std::isfinite(Ntilde_prime)) throw std::invalid_argument("interaction_flux: Ntilde_prime must be finite");
  if (mu != 1.0 && mu != -1.0) throw std::invalid_argument("interaction_flux: mu must be +1 or -1");
  const GridSpec& g = f.grid();
  const int d = g.dim();
  const double R = w.R();
  const double N = Ntilde;
  const Densities den = densities(f);
  const PaddedConvolver conv(g);

  // Profile values on the padded difference lattice.
  const std::size_t P = conv.padded_size();
  std::vector<double> phi(P, 0.0), psi(P, 0.0);
  std::vector<Point> zhat(P, Point{0.0, 0.0}), zs(P, Point{0.0, 0.0});
  std::vector<bool> valid(P, false);
  for (std::size_t i = 0; i < P; ++i) {
    Point z{};
    if (!conv.difference(i, z)) continue;
    valid[i] = true;
    const double norm = std::hypot(z[0], z[1]);
    const double r = norm * N / R;
    phi[i] = w.phi(r);
    psi[i] = w.psi(r);
    zs[i] = z;
    if (norm > 0.0) zhat[i] = {z[0] / norm, z[1] / norm};
  }
  auto kernel_hat = [&](auto&& value) {
    std::vector<double> k(P, 0.0);
    for (std::size_t i = 0; i < P; ++i) {
      if (valid[i]) k[i] = value(i);
    }
    return conv.transform_kernel(k);
  };

  const auto rho_hat = conv.transform_samples(den.rho);
  std::vector<std::vector<Complex>> p_hat;
  for (int j = 0; j < d; ++j) p_hat.push_back(conv.transform_samples(den.p[j]));

  MorawetzReport rep;
  const double c = 2.0 / (d + 2);

  // Action and scale drift: kernels a_j and phi z_j.
  for (int j = 0; j < d; ++j) {
    const auto a_hat = kernel_hat([&](std::size_t i) { return N * psi[i] * zs[i][j]; });
    rep.action += dot(g, den.p[j], conv.apply(a_hat, rho_hat));
    const auto e_hat = kernel_hat([&](std::size_t i) { return phi[i] * zs[i][j]; });
    rep.envelope_drift += Ntilde_prime * dot(g, den.p[j], conv.apply(e_hat, rho_hat));
  }

  // Divergence D = N [(d-1) psi + phi].
  const auto div_hat = kernel_hat([&](std::size_t i) { return N * ((d - 1) * psi[i] + phi[i]); });
  const auto div_rho = conv.apply(div_hat, rho_hat);
  rep.curvature = -0.5 * dot(g, den.lap_rho, div_rho);
  const double nonlinear = mu * c * dot(g, den.power, div_rho);

  // Direct route: K_jk = N [psi delta_jk + (phi - psi) zhat_j zhat_k].
  double stress_term = 0.0, momentum_term = 0.0;
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const auto K_hat = kernel_hat([&](std::size_t i) {
        return N * ((j == k ? psi[i] : 0.0) + (phi[i] - psi[i]) * zhat[i][j] * zhat[i][k]);
      });
      stress_term += 2.0 * dot(g, den.stress[j * d + k], conv.apply(K_hat, rho_hat));
      momentum_term -= 2.0 * dot(g, den.p[j], conv.apply(K_hat, p_hat[k]));
    }
  }
  rep.flux = stress_term + momentum_term + nonlinear + rep.curvature + rep.envelope_drift;

  // Decomposition route: phi part and (psi - phi) angular remainder.
  const auto phi_hat = kernel_hat([&](std::size_t i) { return phi[i]; });
  const auto phi_rho = conv.apply(phi_hat, rho_hat);
  double dispersive = dot(g, den.grad_sq, phi_rho);
  for (int j = 0; j < d; ++j) dispersive -= dot(g, den.p[j], conv.apply(phi_hat, p_hat[j]));
  rep.dispersive = 2.0 * N * dispersive;
  rep.coercive = rep.dispersive + mu * (2.0 * d / (d + 2)) * N * dot(g, den.power, phi_rho);

  if (d > 1) {
    double tail = 0.0;
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        const auto G_hat = kernel_hat([&](std::size_t i) {
          return (psi[i] - phi[i]) * ((j == k ? 1.0 : 0.0) - zhat[i][j] * zhat[i][k]);
        });
        tail += dot(g, den.stress[j * d + k], conv.apply(G_hat, rho_hat));
        tail -= dot(g, den.p[j], conv.apply(G_hat, p_hat[k]));
      }
    }
    const auto diff_hat = kernel_hat([&](std::size_t i) { return psi[i] - phi[i]; });
    rep.tail = 2.0 * N * tail +
               mu * (2.0 * (d - 1) / (d + 2)) * N * dot(g, den.power, conv.apply(diff_hat, rho_hat));
  }
  return rep;
}

double defocusing_gap(const Field& f, const GroundState& q) {
  if (f.grid().dim() != q.field.grid().dim()) {
    throw std::invalid_argument("defocusing_gap: dimension mismatch with the ground state");
  }
  return energy(f, -1.0);
}

double gap_lower_bound(const Field& f, const GroundState& q) {
  if (f.grid().dim() != q.field.grid().dim()) {
    throw std::invalid_argument("gap_lower_bound: dimension mismatch with the ground state");
  }
  const int d = f.grid().dim();
  const double ratio = std::pow(mass(f) / q.mass_sq, 2.0 / d);
  return (1.0 - ratio) * 0.5 * gradient_norm_sq(f);
}

double defocusing_interaction_action(const Field& f) {
  if (f.grid().dim() != 1) throw std::invalid_argument("defocusing_interaction_action: d must be 1");
  const auto p = momentum_density(f);
  std::vector<double> rho(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) rho[i] = std::norm(f[i]);
  const auto conv = convolve_difference(
      f.grid(), [](const Point& z) { return z[0] > 0.0 ? 1.0 : (z[0] < 0.0 ? -1.0 : 0.0); }, rho);
  return dot(f.grid(), p[0], conv);
}

std::vector<FrozenWindow> galilean_freezing(const Field& f, double Ntilde, const WeightFamily& w,
                                            double spacing) {
  require_scale(Ntilde);
  require_dim(f, w);
  if (!(spacing > 0.0)) throw std::invalid_argument("galilean_freezing: spacing must be positive");
  const GridSpec& g = f.grid();
  const int d = g.dim();
  const double scale = Ntilde / w.R();
  const Densities den = densities(f);
  const double total = detail::quadrature(g, den.rho);

  const double extent = g.half_width() * scale + w.M();
  const int steps = static_cast<int>(std::floor(extent / spacing));
  std::vector<FrozenWindow> out;
  const int outer = d == 1 ? 0 : steps;
  for (int a = -steps; a <= steps; ++a) {
    for (int b = -outer; b <= outer; ++b) {
      const Point s{a * spacing, b * spacing};
      double m = 0.0, grad = 0.0;
      Point mom{0.0, 0.0};
      for (std::size_t i = 0; i < f.size(); ++i) {
        const Point x = g.point(i);
        const double r = std::hypot(x[0] * scale - s[0], d == 1 ? 0.0 : x[1] * scale - s[1]);
        if (r >= w.M()) continue;
        const double win = w.varphi(r);
        m += win * den.rho[i];
        grad += win * den.grad_sq[i];
        for (int j = 0; j < d; ++j) mom[j] += win * den.p[j][i];
      }
      const double cell = g.cell_volume();
      m *= cell;
      grad *= cell;
      mom = {mom[0] * cell, mom[1] * cell};
      if (m <= 1e-14 * total) continue;
      FrozenWindow fw;
      fw.s = s;
      fw.window_mass = m;
      fw.xi = {mom[0] / m, mom[1] / m};
      fw.before = grad * m - (mom[0] * mom[0] + mom[1] * mom[1]);
      // \int W |grad(e^{-ix.xi} u)|^2 = \int W |grad u|^2 - 2 xi.\int W p + |xi|^2 \int W rho.
      const double xi_sq = fw.xi[0] * fw.xi[0] + fw.xi[1] * fw.xi[1];
      const double boosted = grad - 2.0 * (fw.xi[0] * mom[0] + fw.xi[1] * mom[1]) + xi_sq * m;
      fw.after = boosted * m;
      out.push_back(fw);
    }
  }
  return out;
}

}  // namespace mcnls
