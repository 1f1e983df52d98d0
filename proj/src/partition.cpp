#include "nre/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nre {

std::vector<std::vector<std::size_t>> Partition::groups() const {
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(group_count));
    for (std::size_t i = 0; i < assignment.size(); ++i)
        out[static_cast<std::size_t>(assignment[i])].push_back(i);
    return out;
}

Matrix laplacian(const Matrix& weights) {
    if (weights.rows() != weights.cols())
        throw std::invalid_argument("laplacian: matrix not square");
    const std::size_t n = weights.rows();
    Matrix lap(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) degree += weights(i, j);
        for (std::size_t j = 0; j < n; ++j) lap(i, j) = -weights(i, j);
        lap(i, i) += degree;
    }
    return lap;
}

Matrix laplacian(const ConnectivityGraph& graph) { return laplacian(graph.weights); }

Vector fiedler_vector(const Matrix& lap, double tol) {
    const std::size_t n = lap.rows();
    if (n < 2) throw std::invalid_argument("fiedler_vector: need at least 2 nodes");

    // Gershgorin upper bound on the Laplacian spectrum; M = c I - L maps
    // the second-smallest eigenvalue of L to the second-largest of M.
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(lap(i, j));
        bound = std::max(bound, row);
    }
    const double shift = bound + 1.0;

    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? shift : 0.0) - lap(i, j);

    // Deterministic start vector with components along every coordinate.
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::cos(static_cast<double>(i) + 0.5);

    auto deflate_ones = [&](Vector& x) {
        double mean = 0.0;
        for (double value : x) mean += value;
        mean /= static_cast<double>(n);
        for (double& value : x) value -= mean;
    };
    deflate_ones(v);
    double vn = norm2(v);
    if (vn == 0.0) {
        v[0] = 1.0;
        deflate_ones(v);
        vn = norm2(v);
    }
    for (double& value : v) value /= vn;

    const int max_iters = static_cast<int>(10 * n);
    Vector prev = v;
    for (int iter = 0; iter < max_iters; ++iter) {
        Vector w = kernels::matvec(m, v, kernels::Exec::Serial);
        deflate_ones(w);
        const double wn = norm2(w);
        if (wn == 0.0) break;  // v already spans the deflated kernel
        for (std::size_t i = 0; i < n; ++i) w[i] /= wn;
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(w[i] - v[i]));
        v = std::move(w);
        if (diff <= tol) break;
    }
    return v;
}

namespace {

// Relabel group markers to contiguous ids in first-appearance order.
Partition canonical_partition(const std::vector<int>& raw) {
    Partition p;
    p.assignment.assign(raw.size(), -1);
    std::vector<int> seen;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const int marker = raw[i];
        int id = -1;
        for (std::size_t k = 0; k < seen.size(); ++k)
            if (seen[k] == marker) { id = static_cast<int>(k); break; }
        if (id < 0) {
            id = static_cast<int>(seen.size());
            seen.push_back(marker);
        }
        p.assignment[i] = id;
    }
    p.group_count = static_cast<int>(seen.size());
    return p;
}

// Sign-class bisection of the index subset `members` within `weights`.
// Returns local markers 0/1 per member (0 = positive class).
std::vector<int> bisect_members(const Matrix& weights, const std::vector<std::size_t>& members) {
    const std::size_t k = members.size();
    Matrix sub(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) sub(a, b) = weights(members[a], members[b]);
    const Vector fiedler = fiedler_vector(laplacian(sub));
    std::vector<int> marker(k, 0);
    for (std::size_t a = 0; a < k; ++a) marker[a] = fiedler[a] >= 0.0 ? 0 : 1;
    return marker;
}

void split_recursive(const Matrix& weights, const std::vector<std::size_t>& members,
                     std::size_t max_size, std::vector<int>& assignment, int& next_id) {
    if (members.size() <= max_size) {
        const int id = next_id++;
        for (std::size_t index : members) assignment[index] = id;
        return;
    }
    const std::vector<int> marker = bisect_members(weights, members);
    std::vector<std::size_t> positive, negative;
    for (std::size_t a = 0; a < members.size(); ++a)
        (marker[a] == 0 ? positive : negative).push_back(members[a]);
    if (positive.empty() || negative.empty()) {
        // Degenerate split; cannot recurse further, emit as one group.
        const int id = next_id++;
        for (std::size_t index : members) assignment[index] = id;
        return;
    }
    split_recursive(weights, positive, max_size, assignment, next_id);
    split_recursive(weights, negative, max_size, assignment, next_id);
}

} // namespace

Partition spectral_bisect(const ConnectivityGraph& graph) {
    const std::size_t n = graph.size();
    if (n < 2) throw std::invalid_argument("spectral_bisect: need at least 2 entities");
    std::vector<std::size_t> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = i;
    const std::vector<int> marker = bisect_members(graph.weights, members);
    return canonical_partition(marker);
}

Partition partition_to_size(const ConnectivityGraph& graph, std::size_t max_size) {
    if (max_size < 1) throw std::invalid_argument("partition_to_size: max_size must be >= 1");
    const std::size_t n = graph.size();
    std::vector<int> assignment(n, -1);
    std::vector<std::size_t> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = i;
    int next_id = 0;
    split_recursive(graph.weights, members, max_size, assignment, next_id);
    return canonical_partition(assignment);
}

double cut_weight(const ConnectivityGraph& graph, const Partition& partition) {
    const std::size_t n = graph.size();
    if (partition.assignment.size() != n)
        throw std::invalid_argument("cut_weight: partition size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (partition.assignment[i] != partition.assignment[j]) total += graph.weights(i, j);
    return total;
}

} // namespace nre
