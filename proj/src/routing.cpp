#include "nre/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace nre {

void Topology::add_edge(std::size_t a, std::size_t b) {
    if (a == b) return;
    if (a >= adjacency_.size() || b >= adjacency_.size())
        throw std::invalid_argument("topology: node index out of range");
    auto& na = adjacency_[a];
    if (std::find(na.begin(), na.end(), b) != na.end()) return;
    na.push_back(b);
    adjacency_[b].push_back(a);
}

Topology Topology::without(const std::vector<std::size_t>& excluded) const {
    std::vector<char> drop(adjacency_.size(), 0);
    for (std::size_t node : excluded)
        if (node < drop.size()) drop[node] = 1;
    Topology out(adjacency_.size());
    for (std::size_t a = 0; a < adjacency_.size(); ++a) {
        if (drop[a]) continue;
        for (std::size_t b : adjacency_[a])
            if (a < b && !drop[b]) out.add_edge(a, b);
    }
    return out;
}

namespace {

constexpr double kNoRisk = -std::numeric_limits<double>::infinity();

struct NodeState {
    double key = std::numeric_limits<double>::infinity();  // best bottleneck
    int hops = 0;
    std::size_t pred = static_cast<std::size_t>(-1);
    bool reached = false;
    bool settled = false;
};

std::vector<std::size_t> reconstruct(const std::vector<NodeState>& states, std::size_t node) {
    std::vector<std::size_t> path;
    for (std::size_t cur = node; cur != static_cast<std::size_t>(-1); cur = states[cur].pred)
        path.push_back(cur);
    std::reverse(path.begin(), path.end());
    return path;
}

// Single-source bottleneck Dijkstra. The settled key of node v is the best
// achievable maximum over counted path nodes, where v itself counts iff
// include_endpoints (so the key of a destination is its final path risk)
// and src counts under the same flag. Ties resolve toward fewer hops and
// then the lexicographically smallest node sequence.
std::vector<NodeState> bottleneck_dijkstra(const Topology& topology, const Vector& risks,
                                           std::size_t src, bool include_endpoints) {
    const std::size_t n = topology.node_count();
    std::vector<NodeState> states(n);

    states[src].key = include_endpoints ? risks[src] : kNoRisk;
    states[src].hops = 0;
    states[src].reached = true;

    using Entry = std::tuple<double, int, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    heap.emplace(states[src].key, 0, src);

    while (!heap.empty()) {
        const auto [key, hops, node] = heap.top();
        heap.pop();
        NodeState& cur = states[node];
        if (cur.settled) continue;
        if (key != cur.key || hops != cur.hops) continue;  // stale entry
        cur.settled = true;

        for (std::size_t next : topology.neighbors(node)) {
            NodeState& tgt = states[next];
            if (tgt.settled) continue;

            double cand_key;
            if (include_endpoints) {
                cand_key = std::max(cur.key, risks[next]);
            } else {
                cand_key = (node == src) ? kNoRisk : std::max(cur.key, risks[node]);
            }
            const int cand_hops = cur.hops + 1;

            bool better = false;
            if (!tgt.reached || cand_key < tgt.key ||
                (cand_key == tgt.key && cand_hops < tgt.hops)) {
                better = true;
            } else if (cand_key == tgt.key && cand_hops == tgt.hops) {
                std::vector<std::size_t> cand_path = reconstruct(states, node);
                cand_path.push_back(next);
                const std::vector<std::size_t> cur_path = reconstruct(states, next);
                better = cand_path < cur_path;
            }
            if (better) {
                tgt.key = cand_key;
                tgt.hops = cand_hops;
                tgt.pred = node;
                tgt.reached = true;
                heap.emplace(cand_key, cand_hops, next);
            }
        }
    }
    return states;
}

RouteResult result_for(const std::vector<NodeState>& states, std::size_t dst) {
    RouteResult r;
    if (!states[dst].reached) return r;
    r.reachable = true;
    r.path = reconstruct(states, dst);
    r.path_risk = states[dst].key == kNoRisk ? 0.0 : states[dst].key;
    return r;
}

void check_query(const Topology& topology, const Vector& risks, std::size_t src) {
    if (risks.size() != topology.node_count())
        throw std::invalid_argument("routing: risk vector does not match topology size");
    if (src >= topology.node_count()) throw std::invalid_argument("routing: src out of range");
}

} // namespace

RouteResult min_max_path(const Topology& topology, const Vector& risks, std::size_t src,
                         std::size_t dst, bool include_endpoints) {
    check_query(topology, risks, src);
    if (dst >= topology.node_count()) throw std::invalid_argument("routing: dst out of range");
    if (src == dst) throw std::invalid_argument("routing: src and dst must differ");
    const std::vector<NodeState> states = bottleneck_dijkstra(topology, risks, src, include_endpoints);
    return result_for(states, dst);
}

std::vector<RouteResult> all_min_max_paths(const Topology& topology, const Vector& risks,
                                           std::size_t src, bool include_endpoints) {
    check_query(topology, risks, src);
    const std::vector<NodeState> states = bottleneck_dijkstra(topology, risks, src, include_endpoints);
    std::vector<RouteResult> out(topology.node_count());
    for (std::size_t dst = 0; dst < topology.node_count(); ++dst) out[dst] = result_for(states, dst);
    return out;
}

} // namespace nre
