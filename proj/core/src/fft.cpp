#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "fracgs/errors.hpp"

namespace fracgs::detail {
namespace {

// FFTW planning is not thread-safe; execution on new arrays is. Plans are
// created once per size under the lock and reused with fftw_execute_dft_*.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* r = fftw_alloc_real(n);
  fftw_complex* c = fftw_alloc_complex(n / 2 + 1);
  if (r == nullptr || c == nullptr) throw NumericError("fftw allocation failed");
  const int ni = static_cast<int>(n);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_1d(ni, r, c, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_1d(ni, c, r, FFTW_ESTIMATE);
  fftw_free(r);
  fftw_free(c);
  if (p.forward == nullptr || p.backward == nullptr) {
    throw NumericError("fftw planning failed");
  }
  cache.emplace(n, p);
  return p;
}

struct RealBuf {
  explicit RealBuf(std::size_t n) : p(fftw_alloc_real(n)) {}
  ~RealBuf() { fftw_free(p); }
  RealBuf(const RealBuf&) = delete;
  RealBuf& operator=(const RealBuf&) = delete;
  double* p;
};

struct ComplexBuf {
  explicit ComplexBuf(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~ComplexBuf() { fftw_free(p); }
  ComplexBuf(const ComplexBuf&) = delete;
  ComplexBuf& operator=(const ComplexBuf&) = delete;
  fftw_complex* p;
};

}  // namespace

cvec rfft(std::span<const double> f) {
  const std::size_t n = f.size();
  const PlanPair plans = plans_for(n);
  RealBuf in(n);
  ComplexBuf out(n / 2 + 1);
  std::copy(f.begin(), f.end(), in.p);
  fftw_execute_dft_r2c(plans.forward, in.p, out.p);
  cvec spec(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) spec[k] = {out.p[k][0], out.p[k][1]};
  return spec;
}

std::vector<double> irfft(std::span<const std::complex<double>> spec, std::size_t n) {
  if (spec.size() != n / 2 + 1) throw ConfigError("irfft: spectrum size mismatch");
  const PlanPair plans = plans_for(n);
  ComplexBuf in(n / 2 + 1);
  RealBuf out(n);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    in.p[k][0] = spec[k].real();
    in.p[k][1] = spec[k].imag();
  }
  in.p[0][1] = 0.0;
  in.p[n / 2][1] = 0.0;
  fftw_execute_dft_c2r(plans.backward, in.p, out.p);
  std::vector<double> f(out.p, out.p + n);
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : f) v *= inv;
  return f;
}

std::vector<double> dct1(std::span<const double> f) {
  const std::size_t n = f.size() - 1;
  std::vector<double> ext(2 * n);
  for (std::size_t j = 0; j <= n; ++j) ext[j] = f[j];
  for (std::size_t j = 1; j < n; ++j) ext[2 * n - j] = f[j];
  const cvec spec = rfft(ext);
  std::vector<double> out(n + 1);
  for (std::size_t m = 0; m <= n; ++m) out[m] = spec[m].real();
  return out;
}

}  // namespace fracgs::detail
