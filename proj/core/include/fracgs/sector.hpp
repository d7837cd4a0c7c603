#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracgs/grid.hpp"

namespace fracgs {

/// Parity-restricted trigonometric bases, orthonormal under the plain grid
/// sum sum_j u_j v_j.
///
/// even: e_0 = 1/sqrt(N), e_k = sqrt(2/N) cos(2 pi j k / N) for 0 < k < N/2,
///       e_{N/2} = (-1)^j / sqrt(N); dimension N/2 + 1.
/// odd:  e_k = sqrt(2/N) sin(2 pi j k / N) for 0 < k < N/2; dimension N/2 - 1.
///
/// Index i of the odd basis carries wavenumber k = i + 1.
std::size_t sector_dimension(std::size_t n, Parity p);
std::size_t sector_wavenumber(std::size_t index, Parity p);

/// Coefficients of f in the sector basis. The component of f outside the
/// sector is discarded.
std::vector<double> to_sector(const Field& f, Parity p);

/// Grid field with the given sector coefficients. The result has unit grid
/// ell^2 norm per unit coefficient norm.
Field from_sector(const Grid& grid, std::span<const double> coeffs, Parity p);

/// Column-major dense matrix of multiplication by w in the sector basis.
/// w is symmetrized first.
std::vector<double> multiplication_matrix(const Field& w, Parity p);

}  // namespace fracgs
