#pragma once

#include <cstddef>
#include <vector>

#include "sphlab/numcore/matrix.hpp"
#include "sphlab/numcore/rng.hpp"

namespace sphlab {

/// rows x cols matrix of i.i.d. standard normal entries drawn from `rng`.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng);

/// Thin Q factor of a Householder QR of `m` (rows >= cols), with column signs
/// chosen so the triangular factor has a nonnegative diagonal. With that
/// convention a Gaussian input yields a Haar-distributed frame.
///
/// Throws DegenerateInput when a diagonal entry of R falls below
/// 1e-12 * (largest column norm).
Matrix orthonormalize(const Matrix& m);

/// Orthonormal basis (rows x (rows - cols)) of the orthogonal complement of
/// the column span of an orthonormal `basis`.
Matrix complement_basis(const Matrix& basis);

struct SymmetricEigen {
  std::vector<double> values;  ///< ascending
  Matrix vectors;              ///< column j pairs with values[j]
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Intended for the
/// small k x k matrices used throughout; cost is O(k^3) per sweep.
SymmetricEigen symmetric_eigen(const Matrix& s);

/// Singular values of `m` (cols <= rows), ascending, computed as square roots
/// of the eigenvalues of the Gram matrix m^T m.
std::vector<double> singular_values_small(const Matrix& m);

/// Lower-triangular L with s = L L^T. Throws DegenerateInput when `s` is not
/// numerically positive definite.
Matrix cholesky(const Matrix& s);

/// Eigenvalues mu of a v = mu b v for symmetric a and symmetric positive
/// definite b, ascending. Reduced to a standard problem through the
/// Cholesky factor of b.
std::vector<double> generalized_symmetric_eigenvalues(const Matrix& a, const Matrix& b);

}  // namespace sphlab
