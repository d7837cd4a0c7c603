#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fracgs::detail {

using cvec = std::vector<std::complex<double>>;

/// Unnormalized forward real DFT: F_k = sum_j f_j exp(-2 pi i j k / N),
/// k = 0..N/2.
cvec rfft(std::span<const double> f);

/// Inverse of rfft including the 1/N factor. `spec` has N/2 + 1 entries; the
/// imaginary parts of the k = 0 and k = N/2 entries are ignored.
std::vector<double> irfft(std::span<const std::complex<double>> spec, std::size_t n);

/// Real DCT-I of length n + 1 via a mirrored real DFT of size 2n:
/// out_m = sum_j w_j f_j cos(pi j m / n), w_0 = w_n = 1, otherwise 2.
std::vector<double> dct1(std::span<const double> f);

}  // namespace fracgs::detail
