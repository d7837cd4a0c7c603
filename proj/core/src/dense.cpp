#include "fracgs/dense.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fracgs/errors.hpp"

namespace fracgs {

DenseMatrix::DenseMatrix(std::size_t dim, std::vector<double> data) : n(dim), a(std::move(data)) {
  if (a.size() != n * n) throw ConfigError("dense matrix data size mismatch");
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double xc = x[c];
    const double* col = a.data() + c * n;
    for (std::size_t r = 0; r < n; ++r) y[r] += col[r] * xc;
  }
  return y;
}

double DenseMatrix::symmetry_defect() const {
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      scale = std::max(scale, std::abs((*this)(r, c)));
      worst = std::max(worst, std::abs((*this)(r, c) - (*this)(c, r)));
    }
  }
  return scale == 0.0 ? 0.0 : worst / scale;
}

namespace {

void check_info(lapack_int info, const char* routine) {
  if (info != 0) {
    throw NumericError(std::string(routine) + " failed with info " + std::to_string(info),
                       static_cast<double>(info));
  }
}

}  // namespace

EigenPairs lowest_eigenpairs(const DenseMatrix& m, std::size_t count) {
  const auto n = static_cast<lapack_int>(m.n);
  count = std::min<std::size_t>(count, m.n);
  if (count == 0) throw ConfigError("eigenpair count must be positive");
  std::vector<double> a = m.a;
  lapack_int found = 0;
  EigenPairs out;
  out.values.resize(m.n);
  out.vectors.resize(m.n * count);
  std::vector<lapack_int> support(2 * count);
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, 1,
                                         static_cast<lapack_int>(count), 0.0, &found,
                                         out.values.data(), out.vectors.data(), n, support.data());
  check_info(info, "dsyevr");
  out.values.resize(static_cast<std::size_t>(found));
  out.vectors.resize(m.n * static_cast<std::size_t>(found));
  // A miscomputing BLAS kernel leaves the eigenvalues intact but not the
  // vectors; refuse to return those.
  double scale = 0.0;
  for (double x : m.a) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    std::span<const double> v(out.vectors.data() + i * m.n, m.n);
    const auto av = m.multiply(v);
    double r = 0.0;
    for (std::size_t j = 0; j < m.n; ++j) r = std::max(r, std::abs(av[j] - out.values[i] * v[j]));
    if (r > 1e-9 * std::max(scale, 1.0) * std::sqrt(static_cast<double>(m.n))) {
      throw NumericError("eigenvector residual " + std::to_string(r) +
                             " is not at roundoff level; the linked BLAS is unreliable",
                         r);
    }
  }
  return out;
}

std::vector<double> eigenvalues(const DenseMatrix& m) {
  const auto n = static_cast<lapack_int>(m.n);
  std::vector<double> a = m.a;
  std::vector<double> w(m.n);
  lapack_int found = 0;
  std::vector<lapack_int> support(2 * m.n);
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'A', 'U', n, a.data(), n, 0.0, 0.0, 0,
                                         0, 0.0, &found, w.data(), nullptr, 1, support.data());
  check_info(info, "dsyevr");
  w.resize(static_cast<std::size_t>(found));
  return w;
}

std::size_t count_below(const DenseMatrix& m, double shift) {
  DenseMatrix a = m;
  for (std::size_t i = 0; i < m.n; ++i) a(i, i) -= shift;
  try {
    return SymmetricFactor(std::move(a)).negative_count();
  } catch (const NumericError&) {
    return m.n;  // exactly singular: treat as not certifiable
  }
}

namespace {

using Columns = std::vector<std::vector<double>>;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void project_out(std::vector<double>& v, const Columns& basis) {
  for (const auto& b : basis) {
    const double d = dot(b, v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * b[i];
  }
}

// Appends the part of each candidate orthogonal to `fixed` and to the
// columns already accepted; nearly dependent candidates are dropped.
void orthonormal_extend(Columns& basis, Columns candidates, const Columns& fixed) {
  for (auto& v : candidates) {
    const double before = std::sqrt(dot(v, v));
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      project_out(v, fixed);
      project_out(v, basis);
    }
    const double after = std::sqrt(dot(v, v));
    if (after <= 1e-10 * before) continue;
    for (double& x : v) x /= after;
    basis.push_back(std::move(v));
  }
}

}  // namespace

LobpcgResult lobpcg(const LinearMap& apply, std::size_t n, std::span<const double> precond_diag,
                    const std::vector<std::vector<double>>& constraints,
                    std::span<const double> start, const LobpcgOptions& options) {
  if (options.count == 0) throw ConfigError("lobpcg needs count >= 1");
  if (precond_diag.size() != n) throw ConfigError("lobpcg preconditioner size mismatch");
  const std::size_t block = std::min(options.count + options.guard, n - constraints.size());
  if (block < options.count) throw ConfigError("lobpcg block exceeds the free dimension");

  Columns fixed;
  orthonormal_extend(fixed, constraints, {});

  auto apply_col = [&](const std::vector<double>& x) {
    std::vector<double> y(n);
    apply(x, y);
    return y;
  };

  Columns initial;
  const std::size_t given = std::min(start.size() / n, block);
  for (std::size_t c = 0; c < given; ++c) {
    initial.emplace_back(start.begin() + c * n, start.begin() + (c + 1) * n);
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss;
  Columns x;
  while (true) {
    orthonormal_extend(x, initial, fixed);
    if (x.size() >= block) break;
    initial.assign(block - x.size(), std::vector<double>(n));
    for (auto& v : initial) {
      for (std::size_t i = 0; i < n; ++i) v[i] = gauss(rng) / precond_diag[i];
    }
  }
  x.resize(block);

  Columns ax, p;
  LobpcgResult out;
  std::vector<double> theta(block, 0.0);

  // Rayleigh-Ritz on the orthonormal columns s; keeps the lowest `block`.
  auto rayleigh_ritz = [&](const Columns& s, const Columns& as) {
    const std::size_t m = s.size();
    DenseMatrix h(m);
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t r = 0; r <= c; ++r) {
        const double v = 0.5 * (dot(s[r], as[c]) + dot(as[r], s[c]));
        h(r, c) = v;
        h(c, r) = v;
      }
    }
    const EigenPairs e = lowest_eigenpairs(h, block);
    Columns nx(block, std::vector<double>(n, 0.0)), nax = nx, np = nx;
    for (std::size_t j = 0; j < block; ++j) {
      theta[j] = e.values[j];
      for (std::size_t r = 0; r < m; ++r) {
        const double w = e.vectors[j * m + r];
        for (std::size_t i = 0; i < n; ++i) {
          nx[j][i] += w * s[r][i];
          nax[j][i] += w * as[r][i];
          if (r >= block) np[j][i] += w * s[r][i];
        }
      }
    }
    x = std::move(nx);
    ax = std::move(nax);
    p = std::move(np);
  };

  for (const auto& v : x) ax.push_back(apply_col(v));
  rayleigh_ritz(x, ax);
  p.clear();

  out.residuals.assign(block, 0.0);
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    Columns w;
    bool done = true;
    for (std::size_t j = 0; j < block; ++j) {
      std::vector<double> r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = ax[j][i] - theta[j] * x[j][i];
      project_out(r, fixed);  // residual of the compressed operator
      const double rn = std::sqrt(dot(r, r));
      out.residuals[j] = rn;
      if (j < options.count && rn > options.tol * (1.0 + std::abs(theta[j]))) done = false;
      for (std::size_t i = 0; i < n; ++i) r[i] /= precond_diag[i];
      w.push_back(std::move(r));
    }
    if (done) {
      out.converged = true;
      break;
    }
    Columns s = x;
    orthonormal_extend(s, std::move(w), fixed);
    orthonormal_extend(s, std::move(p), fixed);
    Columns as = ax;
    for (std::size_t c = block; c < s.size(); ++c) as.push_back(apply_col(s[c]));
    rayleigh_ritz(s, as);
  }

  out.pairs.values.assign(theta.begin(), theta.begin() + options.count);
  out.pairs.vectors.reserve(n * options.count);
  for (std::size_t j = 0; j < options.count; ++j) {
    out.pairs.vectors.insert(out.pairs.vectors.end(), x[j].begin(), x[j].end());
  }
  out.residuals.resize(options.count);
  return out;
}

LuFactor::LuFactor(DenseMatrix m) : lu_(std::move(m)), ipiv_(lu_.n) {
  const auto n = static_cast<lapack_int>(lu_.n);
  const double anorm = LAPACKE_dlange(LAPACK_COL_MAJOR, '1', n, n, lu_.a.data(), n);
  const lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, lu_.a.data(), n, ipiv_.data());
  if (info > 0) throw NumericError("dgetrf: exactly singular matrix", 0.0);
  check_info(info, "dgetrf");
  const lapack_int cinfo = LAPACKE_dgecon(LAPACK_COL_MAJOR, '1', n, lu_.a.data(), n, anorm, &rcond_);
  check_info(cinfo, "dgecon");
}

std::vector<double> LuFactor::solve(std::span<const double> rhs) const {
  const auto n = static_cast<lapack_int>(lu_.n);
  if (rhs.size() != lu_.n) throw ConfigError("LU solve: rhs size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  const lapack_int info =
      LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lu_.a.data(), n, ipiv_.data(), x.data(), n);
  check_info(info, "dgetrs");
  return x;
}

SymmetricFactor::SymmetricFactor(DenseMatrix m) : f_(std::move(m)), ipiv_(f_.n) {
  const auto n = static_cast<lapack_int>(f_.n);
  const double anorm = LAPACKE_dlansy(LAPACK_COL_MAJOR, '1', 'U', n, f_.a.data(), n);
  const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'U', n, f_.a.data(), n, ipiv_.data());
  if (info > 0) throw NumericError("dsytrf: exactly singular matrix", 0.0);
  check_info(info, "dsytrf");
  // Inertia of D: 1x1 pivots by sign; a 2x2 pivot has negative determinant
  // and adds one negative eigenvalue.
  for (std::size_t i = 0; i < f_.n;) {
    if (ipiv_[i] > 0) {
      if (f_(i, i) < 0.0) ++negatives_;
      ++i;
    } else {
      ++negatives_;
      i += 2;
    }
  }
  double rcond = 0.0;
  const lapack_int cinfo =
      LAPACKE_dsycon(LAPACK_COL_MAJOR, 'U', n, f_.a.data(), n, ipiv_.data(), anorm, &rcond);
  check_info(cinfo, "dsycon");
  inverse_norm_ = rcond > 0.0 ? 1.0 / (rcond * anorm) : std::numeric_limits<double>::infinity();
}

std::vector<double> SymmetricFactor::solve(std::span<const double> rhs) const {
  const auto n = static_cast<lapack_int>(f_.n);
  if (rhs.size() != f_.n) throw ConfigError("symmetric solve: rhs size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'U', n, 1, f_.a.data(), n,
                                         ipiv_.data(), x.data(), n);
  check_info(info, "dsytrs");
  return x;
}

}  // namespace fracgs
