#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracgs {

/// Column-major square matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}
  DenseMatrix(std::size_t dim, std::vector<double> data);

  double& operator()(std::size_t r, std::size_t c) { return a[c * n + r]; }
  double operator()(std::size_t r, std::size_t c) const { return a[c * n + r]; }

  std::vector<double> multiply(std::span<const double> x) const;
  /// max |a_rc - a_cr| / max |a_rc|
  double symmetry_defect() const;
};

struct EigenPairs {
  std::vector<double> values;   ///< ascending
  std::vector<double> vectors;  ///< column-major n x values.size(), orthonormal
};

/// Lowest `count` eigenpairs of a symmetric matrix (upper triangle used).
EigenPairs lowest_eigenpairs(const DenseMatrix& m, std::size_t count);

/// All eigenvalues of a symmetric matrix, ascending.
std::vector<double> eigenvalues(const DenseMatrix& m);

/// Number of eigenvalues strictly below `shift`, from the inertia of the
/// symmetric indefinite factorization of m - shift I.
std::size_t count_below(const DenseMatrix& m, double shift);

/// y = A x for a symmetric operator given only by its action.
using LinearMap = std::function<void(std::span<const double> x, std::span<double> y)>;

struct LobpcgOptions {
  std::size_t count = 1;
  double tol = 1e-9;  ///< |A x - theta x| <= tol (1 + |theta|) per pair
  std::size_t max_iterations = 2000;
  /// Extra block columns carried along; more help when the wanted
  /// eigenvalues sit at the edge of a cluster.
  std::size_t guard = 2;
};

struct LobpcgResult {
  EigenPairs pairs;
  std::vector<double> residuals;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Lowest eigenpairs of a symmetric operator of dimension n by block LOBPCG
/// with the diagonal preconditioner 1 / precond_diag, restricted to the
/// orthogonal complement of `constraints`. `start` holds initial columns
/// (column-major, any count up to options.count); the rest are random with
/// a fixed seed.
LobpcgResult lobpcg(const LinearMap& apply, std::size_t n, std::span<const double> precond_diag,
                    const std::vector<std::vector<double>>& constraints,
                    std::span<const double> start, const LobpcgOptions& options);

/// LU factorization with partial pivoting of a general square matrix.
class LuFactor {
 public:
  explicit LuFactor(DenseMatrix m);

  std::vector<double> solve(std::span<const double> rhs) const;
  /// Reciprocal 1-norm condition estimate.
  double rcond() const noexcept { return rcond_; }
  std::size_t size() const noexcept { return lu_.n; }

 private:
  DenseMatrix lu_;
  std::vector<int> ipiv_;
  double rcond_ = 0.0;
};

/// Bunch-Kaufman factorization A = U D U^T of a symmetric matrix (upper
/// triangle used). Throws NumericError when A is exactly singular.
class SymmetricFactor {
 public:
  explicit SymmetricFactor(DenseMatrix m);

  std::vector<double> solve(std::span<const double> rhs) const;
  /// Number of negative eigenvalues (Sylvester inertia of D).
  std::size_t negative_count() const noexcept { return negatives_; }
  /// LAPACK estimate of |A^{-1}|_1. For symmetric A, |A^{-1}|_2 <= |A^{-1}|_1,
  /// so its reciprocal bounds min |eigenvalue| from below whenever the
  /// estimate is sharp (it is exact or close in practice).
  double inverse_norm() const noexcept { return inverse_norm_; }
  std::size_t size() const noexcept { return f_.n; }

 private:
  DenseMatrix f_;
  std::vector<int> ipiv_;
  std::size_t negatives_ = 0;
  double inverse_norm_ = 0.0;
};

}  // namespace fracgs
