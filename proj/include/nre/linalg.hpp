#ifndef NRE_LINALG_HPP
#define NRE_LINALG_HPP

#include "nre/matrix.hpp"

namespace nre {

/// Cholesky factorization A = L L^T of a symmetric matrix.
/// `ok` is false when a pivot is non-positive; `min_pivot` is the smallest
/// pivot value A_jj - sum_k L_jk^2 seen before taking square roots.
struct Cholesky {
    Matrix lower;
    double min_pivot = 0.0;
    bool ok = false;
};

Cholesky cholesky(const Matrix& a);

/// Solve L L^T x = b for one right-hand side.
Vector chol_solve(const Matrix& lower, const Vector& b);

/// Solve L L^T X = B column-wise.
Matrix chol_solve(const Matrix& lower, const Matrix& b);

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
/// Eigenvalues come back ascending, column j of `vectors` is the
/// eigenvector of values[j].
struct SymEigen {
    Vector values;
    Matrix vectors;
};

SymEigen jacobi_eigen(const Matrix& a, int max_sweeps = 64);

/// Pseudo-inverse of a symmetric matrix; eigenvalues with magnitude at or
/// below `threshold` are treated as zero.
Matrix pinv_sym(const Matrix& a, double threshold);

} // namespace nre

#endif
