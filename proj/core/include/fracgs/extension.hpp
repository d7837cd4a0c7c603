#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fracgs/grid.hpp"

namespace fracgs {

/// c_a = 2^a Gamma((1+a)/2) / Gamma((1-a)/2). Throws ConfigError unless
/// -1 < a < 1 (poles at a = +-1).
double c_constant(double a);

/// Weight exponent a = 1 - 2s of the extension for order s in (0, 1).
double weight_exponent(double s);

/// m_a(r) = 2 / Gamma(nu) (r/2)^nu K_nu(r), nu = (1-a)/2, with m_a(0) = 1.
/// It solves m'' + (a/r) m' = m, so E_a f has Fourier slices f^(xi) m_a(|xi| y).
struct ProfileTable {
  double a = 0.0;
  std::vector<double> r;
  std::vector<double> m;
  std::vector<double> dm;  ///< m_a'(r) = -2 / Gamma(nu) (r/2)^nu K_{1-nu}(r); at r = 0 the limit of -c_a r^{-a}
};

/// int_0^inf r^a (m_a'^2 + m_a^2) dr by quadrature; the per-mode form of the
/// energy identity says it equals c_a.
double profile_energy(double a);

/// Direct evaluation by quadrature of the Bessel integral. Values underflow
/// to 0 for r beyond about 745. Throws ConfigError for |a| >= 1 or r < 0.
ProfileTable profile_m(double a, std::span<const double> rs);

/// m_a and m_a' on [r_lo, r_hi] from a log-spaced table: cubic Hermite
/// interpolation of r + log m and r + log(-m') in log r, using m'' = m - (a/r) m'
/// for the slopes. Arguments outside the table are evaluated directly.
class Profile {
 public:
  Profile(double a, double r_lo, double r_hi, std::size_t per_decade = 200);

  double value(double r) const;
  double derivative(double r) const;
  double a() const noexcept { return a_; }

 private:
  double a_;
  double t0_ = 0.0;
  double dt_ = 0.0;
  // r + log m, r + log(-m') and their derivatives in t = log r; the shift
  // removes the exp(-r) decay so the interpolated functions stay tame
  std::vector<double> lm_, lm_t_;
  std::vector<double> ld_, ld_t_;
};

/// Samples u(x_j, y_m) on grid x y-levels; slice m is contiguous.
struct ExtensionField {
  Grid grid;
  std::vector<double> y;  ///< strictly increasing, positive
  double a = 0.0;
  std::vector<double> u;  ///< u[m * N + j]
  Field trace;            ///< boundary values u(., 0)

  Field slice(std::size_t m) const;
  double at(std::size_t j, std::size_t m) const { return u[m * grid.size() + j]; }
};

/// levels log-spaced values from y_min = 1e-4 h to y_max = 2 L.
std::vector<double> default_y_grid(const Grid& grid, std::size_t levels = 256);

/// Log-spaced levels on [y_min, y_max].
std::vector<double> log_y_grid(double y_min, double y_max, std::size_t levels);

struct ExtendOptions {
  /// Compare three random slices with direct P_a-kernel quadrature and throw
  /// NumericError above 1e-5 relative.
  bool cross_check = true;
  std::uint64_t seed = 1;
};

/// u(., y) = F^{-1}[f^(xi) m_a(|xi| y)] for a = 1 - 2s. The zero mode is
/// carried unchanged (m_a(0) = 1) and contributes no energy. Throws
/// ConfigError unless 0 < s < 1 and the y levels are positive and increasing.
ExtensionField extend(const Field& f, double s, std::vector<double> y,
                      const ExtendOptions& options = {});

/// P_a(x, y) = C_a y^{1-a} / (x^2 + y^2)^{(2-a)/2},
/// C_a = Gamma((2-a)/2) / (sqrt(pi) Gamma((1-a)/2)).
double poisson_kernel(double a, double x, double y);

/// int P_a(x, 1) dx by quadrature; equals 1.
double kernel_mass(double a);

/// Max over `slices` random levels with y >= 4 h (and y <= L/4) and eight
/// random nodes of |u - P_a * f| / max |u(., y)|, with the periodic images of
/// the kernel summed to |n| <= 50 plus an integral tail.
double convolution_deviation(const ExtensionField& u, std::size_t slices, std::uint64_t seed);

/// int int (|d_x u|^2 + |d_y u|^2) y^a dx dy. x-derivatives are spectral per
/// slice; y-derivatives are fourth-order differences in log y (the levels
/// must be log-uniform); the y-integral is the trapezoid rule in log y plus
/// the analytic integral of the leading behaviour on (0, y_min).
double dirichlet_energy(const ExtensionField& u);

/// sqrt(sum |y^2 u_xx + u_tt + (a-1) u_t|^2 / sum |y^2 u_xx|^2) over interior
/// levels, t = log y, second-order differences: y^2 div(y^a grad u) / y^a in
/// log coordinates. Zero for exact extensions up to O(dt^2).
double harmonicity_residual(const ExtensionField& u);

struct NeumannReport {
  std::vector<double> eps;
  std::vector<double> deviation;  ///< |N_eps - (-Delta)^s f|_2 / |(-Delta)^s f|_2
  bool decreasing = false;        ///< strictly decreasing as eps decreases
};

/// N_eps = -c_a^{-1} eps^a d_y (E_a f)(., eps) from the profile derivative,
/// compared with (-Delta)^s f, f = u.trace. eps is taken in the given order.
NeumannReport neumann_trace(const ExtensionField& u, const std::vector<double>& eps);

struct RayleighReport {
  double value = 0.0;      ///< c_a^{-1} E(E_a psi) + int V psi^2
  double deviation = 0.0;  ///< |value - claimed|
};

/// Local form of <psi, ((-Delta)^s + V) psi> through the extension. Throws
/// ConfigError unless |psi|_2 = 1 to 1e-8 and 0 < s < 1.
RayleighReport rayleigh_eigen_check(const Field& psi, const Field& v, double claimed, double s,
                                    std::size_t levels = 256);

struct NodalCount {
  std::size_t total = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
};

/// 4-connected components of {u > t} and {u < -t}, t = threshold_fraction
/// max |u|, on the sample lattice; periodic in x like the grid.
NodalCount nodal_domains(const ExtensionField& u, double threshold_fraction = 1e-6);

}  // namespace fracgs
