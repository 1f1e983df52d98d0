#ifndef NRE_ROUTING_HPP
#define NRE_ROUTING_HPP

#include "nre/matrix.hpp"

#include <cstddef>
#include <vector>

namespace nre {

/// Known communication topology: undirected simple graph over entity
/// indices. Distinct from the connectivity graph, which captures observed
/// behavioral association rather than allowed channels.
class Topology {
public:
    explicit Topology(std::size_t node_count = 0) : adjacency_(node_count) {}

    std::size_t node_count() const { return adjacency_.size(); }

    /// Adds an undirected edge; self-loops and duplicates are ignored.
    void add_edge(std::size_t a, std::size_t b);

    const std::vector<std::size_t>& neighbors(std::size_t node) const { return adjacency_[node]; }

    /// Returns a copy without the given nodes (their edges removed,
    /// indices preserved).
    Topology without(const std::vector<std::size_t>& excluded) const;

private:
    std::vector<std::vector<std::size_t>> adjacency_;
};

/// A safe-routing answer: the chosen path and its risk, the maximum mean
/// entity risk over the counted path nodes (0 when no node is counted).
struct RouteResult {
    std::vector<std::size_t> path;  // src..dst, consecutive nodes adjacent
    double path_risk = 0.0;
    bool reachable = false;
};

/// Minimizes the maximum node risk over all simple src->dst paths
/// (bottleneck Dijkstra). Endpoints count toward the maximum iff
/// include_endpoints. Ties broken by fewer hops, then lexicographically
/// smaller node sequence, so the result is deterministic.
RouteResult min_max_path(const Topology& topology, const Vector& risks, std::size_t src,
                         std::size_t dst, bool include_endpoints = true);

/// Single-source variant; entry dst of the result holds the route to dst.
/// The src entry is the trivial one-node path.
std::vector<RouteResult> all_min_max_paths(const Topology& topology, const Vector& risks,
                                           std::size_t src, bool include_endpoints = true);

} // namespace nre

#endif
