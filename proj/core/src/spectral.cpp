#include "fracgs/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "fracgs/errors.hpp"

namespace fracgs {

void SymbolSpec::validate() const {
  if (!(s > 0.0 && s <= 1.0)) {
    std::ostringstream os;
    os << "symbol order must lie in (0, 1], got " << s;
    throw ConfigError(os.str());
  }
  if (!(lambda >= 0.0)) throw ConfigError("symbol shift must be nonnegative");
  if (power < 0.0 && lambda == 0.0) {
    throw SingularSymbolError("negative symbol power with zero shift divides by the zero mode");
  }
}

double symbol_value(const SymbolSpec& spec, double abs_xi) {
  const double d = abs_xi == 0.0 ? 0.0 : std::pow(abs_xi, 2.0 * spec.s);
  double m = spec.power == 0.0 ? 1.0 : std::pow(d + spec.lambda, spec.power);
  if (spec.log) {
    if (abs_xi == 0.0) return 0.0;
    m *= d * 2.0 * std::log(abs_xi);
  }
  return m;
}

Field apply_symbol(const Field& f, const SymbolSpec& spec) {
  spec.validate();
  const Grid& g = f.grid();
  auto F = detail::rfft(f.values());
  for (std::size_t k = 0; k < F.size(); ++k) F[k] *= symbol_value(spec, g.abs_frequency(k));
  return Field(g, detail::irfft(F, g.size()), f.parity());
}

namespace {

// (1/L) sum over all N modes of w(|xi_k|) |f^_k|^2 with f^_k = h F_k.
template <class Weight>
double weighted_power(const Field& f, Weight w) {
  const Grid& g = f.grid();
  const auto F = detail::rfft(f.values());
  const std::size_t half = g.size() / 2;
  double acc = 0.0;
  for (std::size_t k = 0; k <= half; ++k) {
    const double mult = (k == 0 || k == half) ? 1.0 : 2.0;
    acc += mult * w(k, g.abs_frequency(k)) * std::norm(F[k]);
  }
  const double h = g.spacing();
  return acc * h * h / g.length();
}

}  // namespace

double hs_seminorm_sq(const Field& f, double s) {
  return weighted_power(f, [s](std::size_t k, double xi) {
    return k == 0 ? 0.0 : std::pow(xi, 2.0 * s);
  });
}

double l2_norm_sq_spectral(const Field& f) {
  return weighted_power(f, [](std::size_t, double) { return 1.0; });
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) {
    std::ostringstream os;
    os << "lp_norm requires p >= 1, got " << p;
    throw ConfigError(os.str());
  }
  double acc = 0.0;
  if (p == 2.0) {
    for (double v : f.values()) acc += v * v;
    return std::sqrt(acc * f.grid().spacing());
  }
  for (double v : f.values()) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid().spacing(), 1.0 / p);
}

double integral(const Field& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc * f.grid().spacing();
}

double inner(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw ConfigError("inner: field grids differ");
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * g[j];
  return acc * f.grid().spacing();
}

Field derivative(const Field& f) {
  const Grid& g = f.grid();
  auto F = detail::rfft(f.values());
  const std::size_t half = g.size() / 2;
  for (std::size_t k = 0; k < half; ++k) F[k] *= std::complex<double>(0.0, g.abs_frequency(k));
  F[half] = 0.0;
  Parity p = Parity::none;
  if (f.parity() == Parity::even) p = Parity::odd;
  if (f.parity() == Parity::odd) p = Parity::even;
  return Field(g, detail::irfft(F, g.size()), p);
}

std::vector<double> interpolate(const Field& f, std::span<const double> xs) {
  const Grid& g = f.grid();
  const std::size_t n = g.size();
  const std::size_t half = n / 2;
  const auto F = detail::rfft(f.values());
  std::vector<double> out(xs.size());
  constexpr std::size_t kReseed = 128;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double theta = 2.0 * std::numbers::pi * (xs[i] + 0.5 * g.length()) / g.length();
    const std::complex<double> w = std::polar(1.0, theta);
    std::complex<double> wk = w;
    double acc = F[0].real();
    for (std::size_t k = 1; k < half; ++k) {
      if (k % kReseed == 0) wk = std::polar(1.0, theta * static_cast<double>(k));
      acc += 2.0 * (F[k] * wk).real();
      wk *= w;
    }
    acc += F[half].real() * std::cos(theta * static_cast<double>(half));
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

namespace {

// |v|^p with a multiplication fast path for small integer p.
struct PowerFn {
  double p;
  int ip;
  explicit PowerFn(double pp)
      : p(pp), ip(pp == std::floor(pp) && pp >= 1.0 && pp <= 8.0 ? static_cast<int>(pp) : 0) {}
  double operator()(double a) const {
    if (ip == 0) return std::pow(a, p);
    double r = a;
    for (int i = 1; i < ip; ++i) r *= a;
    return r;
  }
};

}  // namespace

Field positive_power(const Field& f, double p) {
  const PowerFn pw(p);
  Field out(f.grid(), f.parity() == Parity::even ? Parity::even : Parity::none);
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = f[j] > 0.0 ? pw(f[j]) : 0.0;
  return out;
}

Field signed_power(const Field& f, double p) {
  const PowerFn pw(p);
  Field out(f.grid(), f.parity());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double a = std::abs(f[j]);
    out[j] = a == 0.0 ? 0.0 : std::copysign(pw(a), f[j]);
  }
  return out;
}

}  // namespace fracgs
