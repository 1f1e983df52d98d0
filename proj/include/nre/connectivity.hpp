#ifndef NRE_CONNECTIVITY_HPP
#define NRE_CONNECTIVITY_HPP

#include "nre/flow_ingest.hpp"
#include "nre/kernels.hpp"
#include "nre/signal_sync.hpp"

#include <memory>

namespace nre {

/// Functional connectivity graph for one window: symmetric weight matrix
/// with entries in [0, 1] and unit diagonal. Weights quantify pairwise
/// behavioral association of entities, not the physical topology.
struct ConnectivityGraph {
    Matrix weights;             // n x n
    double window_start = 0.0;  // t
    double graph_window = 0.0;  // tau
    std::shared_ptr<const EntityIndex> entities;

    std::size_t size() const { return weights.rows(); }
};

/// Entrywise convex combination
///   (1 - forget_factor) * prev + forget_factor * current,
/// the smoothing rule shared by graph- and matrix-level callers.
Matrix smooth_weights(const Matrix& prev, const Matrix& current, double forget_factor);

/// Weight matrix from the magnitude of the pairwise Pearson correlation of
/// the frame's row signals. Rows with zero sample variance get weight 0
/// against everything; the diagonal is forced to 1. Requires N >= 2.
ConnectivityGraph pearson_graph(const SignalFrame& frame);
ConnectivityGraph pearson_graph(const SignalFrame& frame, kernels::Exec mode);

/// Exponential memory across windows:
///   smoothed' = (1 - forget_factor) * smoothed + forget_factor * current.
/// Both inputs must have the same dimension. forget_factor in [0, 1].
ConnectivityGraph smooth(const ConnectivityGraph& prev_smoothed, const ConnectivityGraph& current,
                         double forget_factor);

/// Largest eigenvalue of the (symmetric, entrywise nonnegative) weight
/// matrix by power iteration; for these graphs it is the spectral radius
/// and is always >= 1. Throws on non-convergence within `max_iters`.
double max_eigenvalue(const Matrix& weights, double tol = 1e-10, int max_iters = 100000);
double max_eigenvalue(const ConnectivityGraph& graph, double tol = 1e-10, int max_iters = 100000);

} // namespace nre

#endif
