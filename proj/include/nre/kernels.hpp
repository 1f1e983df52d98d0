#ifndef NRE_KERNELS_HPP
#define NRE_KERNELS_HPP

#include "nre/matrix.hpp"

namespace nre::kernels {

/// Execution policy for the data-parallel kernels. The parallel variants
/// distribute independent output cells across OpenMP threads; per-cell
/// arithmetic is identical to the serial reference, so both policies
/// produce bit-identical results.
enum class Exec { Serial, Parallel };

/// Policy used by the library entry points when none is given. Defaults to
/// Parallel when compiled with OpenMP, Serial otherwise.
Exec default_exec();
void set_default_exec(Exec mode);

/// Number of worker threads the Parallel policy will use (1 without OpenMP).
int thread_count();

/// Magnitude-of-Pearson-correlation matrix of the rows of `signals`
/// (n rows of N samples each, N >= 2). Entries are |r_ij| clamped to
/// [0, 1], the diagonal is set to 1, and any row with zero sample variance
/// (a constant signal) correlates 0 with every other row.
Matrix corr_abs_matrix(const Matrix& signals, Exec mode);

/// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b, Exec mode);

/// f * p * f^T + diag(q). `p` must be square with f.cols() == p.rows().
Matrix propagate_covariance(const Matrix& f, const Matrix& p, const Vector& q_diag, Exec mode);

/// a * x
Vector matvec(const Matrix& a, const Vector& x, Exec mode);

} // namespace nre::kernels

#endif
