#include "fracgs/sector.hpp"

#include <cmath>
#include <complex>

#include "fft.hpp"
#include "fracgs/errors.hpp"

namespace fracgs {

std::size_t sector_dimension(std::size_t n, Parity p) {
  switch (p) {
    case Parity::even:
      return n / 2 + 1;
    case Parity::odd:
      return n / 2 - 1;
    case Parity::none:
      break;
  }
  throw ConfigError("sector requires an even or odd parity");
}

std::size_t sector_wavenumber(std::size_t index, Parity p) {
  return p == Parity::odd ? index + 1 : index;
}

namespace {

double basis_norm(std::size_t k, std::size_t n) {
  const double nn = static_cast<double>(n);
  return (k == 0 || k == n / 2) ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
}

}  // namespace

std::vector<double> to_sector(const Field& f, Parity p) {
  const std::size_t n = f.size();
  const std::size_t dim = sector_dimension(n, p);
  const auto F = detail::rfft(f.values());
  std::vector<double> c(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t k = sector_wavenumber(i, p);
    c[i] = p == Parity::even ? basis_norm(k, n) * F[k].real() : -basis_norm(k, n) * F[k].imag();
  }
  return c;
}

Field from_sector(const Grid& grid, std::span<const double> coeffs, Parity p) {
  const std::size_t n = grid.size();
  if (coeffs.size() != sector_dimension(n, p)) throw ConfigError("sector coefficient count mismatch");
  detail::cvec F(n / 2 + 1, 0.0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::size_t k = sector_wavenumber(i, p);
    // irfft divides by N; basis_norm(k) * N / multiplicity(k) restores e_k.
    const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    const double a = coeffs[i] * basis_norm(k, n) * static_cast<double>(n) / mult;
    F[k] = p == Parity::even ? std::complex<double>(a, 0.0) : std::complex<double>(0.0, -a);
  }
  Field out(grid, detail::irfft(F, n), p);
  return out;
}

std::vector<double> multiplication_matrix(const Field& w, Parity p) {
  const std::size_t n = w.size();
  const std::size_t dim = sector_dimension(n, p);
  Field ws = w;
  ws.symmetrize(Parity::even);
  const auto F = detail::rfft(ws.values());
  std::vector<double> what(n + 1);
  for (std::size_t m = 0; m <= n; ++m) what[m] = F[m <= n / 2 ? m : n - m].real();
  const double sign = p == Parity::even ? 1.0 : -1.0;
  std::vector<double> mat(dim * dim);
  for (std::size_t c = 0; c < dim; ++c) {
    const std::size_t l = sector_wavenumber(c, p);
    const double nl = basis_norm(l, n);
    for (std::size_t r = 0; r < dim; ++r) {
      const std::size_t k = sector_wavenumber(r, p);
      const std::size_t diff = k > l ? k - l : l - k;
      const std::size_t sum = k + l;
      mat[c * dim + r] = basis_norm(k, n) * nl * 0.5 * (what[diff] + sign * what[sum]);
    }
  }
  return mat;
}

}  // namespace fracgs
