#ifndef NRE_PARTITION_HPP
#define NRE_PARTITION_HPP

#include "nre/connectivity.hpp"
#include "nre/matrix.hpp"

#include <vector>

namespace nre {

/// Assignment of every entity index to one group, ids contiguous from 0 in
/// first-appearance order of the groups.
struct Partition {
    std::vector<int> assignment;
    int group_count = 0;

    std::vector<std::vector<std::size_t>> groups() const;
};

/// Unnormalized graph Laplacian L = D - F with D_ii = sum_j F_ij. The
/// diagonal of F cancels, rows sum to zero, and L is PSD for symmetric
/// nonnegative F.
Matrix laplacian(const Matrix& weights);
Matrix laplacian(const ConnectivityGraph& graph);

/// Eigenvector of the second-smallest Laplacian eigenvalue, approximated
/// by shifted power iteration with the all-ones direction deflated.
/// Stops at `tol` on successive iterates or after 10 * n iterations.
Vector fiedler_vector(const Matrix& lap, double tol = 1e-8);

/// Two-way split along the sign classes of the Fiedler vector (zero
/// entries join the positive class); relaxed minimum ratio cut. For a
/// disconnected graph the split falls along component boundaries.
/// Requires n >= 2.
Partition spectral_bisect(const ConnectivityGraph& graph);

/// Recursive bisection of any group larger than max_size; all final
/// groups have at most max_size members. max_size >= 1.
Partition partition_to_size(const ConnectivityGraph& graph, std::size_t max_size);

/// Total weight of edges whose endpoints land in different groups, each
/// unordered pair counted once.
double cut_weight(const ConnectivityGraph& graph, const Partition& partition);

} // namespace nre

#endif
