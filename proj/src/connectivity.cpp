#include "nre/connectivity.hpp"

#include <cmath>
#include <stdexcept>

namespace nre {

ConnectivityGraph pearson_graph(const SignalFrame& frame) {
    return pearson_graph(frame, kernels::default_exec());
}

ConnectivityGraph pearson_graph(const SignalFrame& frame, kernels::Exec mode) {
    if (frame.samples < 2)
        throw std::invalid_argument("pearson_graph: need at least 2 samples per entity");
    ConnectivityGraph graph;
    graph.weights = kernels::corr_abs_matrix(frame.values, mode);
    graph.window_start = frame.window_start;
    graph.graph_window = frame.graph_window;
    graph.entities = frame.entities;
    return graph;
}

Matrix smooth_weights(const Matrix& prev, const Matrix& current, double forget_factor) {
    if (forget_factor < 0.0 || forget_factor > 1.0)
        throw std::invalid_argument("forget factor must lie in [0, 1]");
    if (prev.rows() != current.rows() || prev.cols() != current.cols())
        throw std::invalid_argument("smooth: graph dimensions differ");
    Matrix out(current.rows(), current.cols());
    for (std::size_t i = 0; i < out.rows() * out.cols(); ++i)
        out.data()[i] = (1.0 - forget_factor) * prev.data()[i] + forget_factor * current.data()[i];
    return out;
}

ConnectivityGraph smooth(const ConnectivityGraph& prev_smoothed, const ConnectivityGraph& current,
                         double forget_factor) {
    if (prev_smoothed.entities && current.entities &&
        prev_smoothed.entities != current.entities &&
        prev_smoothed.entities->ids() != current.entities->ids())
        throw std::invalid_argument("smooth: graphs index different entity sets");
    ConnectivityGraph out = current;
    out.weights = smooth_weights(prev_smoothed.weights, current.weights, forget_factor);
    return out;
}

double max_eigenvalue(const Matrix& weights, double tol, int max_iters) {
    if (weights.rows() != weights.cols())
        throw std::invalid_argument("max_eigenvalue: matrix not square");
    const std::size_t n = weights.rows();
    if (n == 0) throw std::invalid_argument("max_eigenvalue: empty matrix");
    if (n == 1) return weights(0, 0);

    // All-ones start vector has positive overlap with the Perron vector of
    // a nonnegative matrix.
    Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 0.0;
    for (int iter = 0; iter < max_iters; ++iter) {
        Vector w = kernels::matvec(weights, v, kernels::Exec::Serial);
        lambda = dot(v, w);  // Rayleigh quotient for the unit vector v
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = w[i] - lambda * v[i];
            residual += r * r;
        }
        const double scale = std::max(1.0, std::abs(lambda));
        if (std::sqrt(residual) <= tol * scale) return lambda;
        const double wn = norm2(w);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    }
    throw std::runtime_error("max_eigenvalue: power iteration did not converge");
}

double max_eigenvalue(const ConnectivityGraph& graph, double tol, int max_iters) {
    return max_eigenvalue(graph.weights, tol, max_iters);
}

} // namespace nre
