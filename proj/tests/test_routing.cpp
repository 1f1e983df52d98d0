#include "nre/routing.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace nre;
using test::Rng;

namespace {

Topology random_connected(Rng& rng, std::size_t n, double extra_edge_prob) {
    Topology topo(n);
    // Random spanning tree first, then extra edges.
    for (std::size_t v = 1; v < n; ++v) topo.add_edge(v, rng.index(v));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (rng.uniform() < extra_edge_prob) topo.add_edge(a, b);
    return topo;
}

Vector random_risks(Rng& rng, std::size_t n, int distinct = 0) {
    Vector risks(n);
    for (double& r : risks)
        r = distinct > 0 ? static_cast<double>(rng.uniform_int(0, distinct - 1)) * 0.1
                         : rng.uniform(0.0, 1.0);
    return risks;
}

} // namespace

TEST_CASE("direct edge with equal risks is the route") {
    Topology topo(3);
    topo.add_edge(0, 1);
    topo.add_edge(1, 2);
    topo.add_edge(0, 2);
    const Vector risks{0.4, 0.4, 0.4};
    const RouteResult r = min_max_path(topo, risks, 0, 2);
    REQUIRE(r.reachable);
    CHECK(r.path == std::vector<std::size_t>{0, 2});
    CHECK(r.path_risk == doctest::Approx(0.4));
}

TEST_CASE("the low-risk detour beats the risky middleman") {
    // Triangle A-B, B-C plus direct A-C; B is hot.
    Topology topo(3);
    topo.add_edge(0, 1);
    topo.add_edge(1, 2);
    topo.add_edge(0, 2);
    const Vector risks{0.1, 0.9, 0.1};
    const RouteResult r = min_max_path(topo, risks, 0, 2);
    REQUIRE(r.reachable);
    CHECK(r.path == std::vector<std::size_t>{0, 2});
    CHECK(r.path_risk == doctest::Approx(0.1));
}

TEST_CASE("unreachable destination is flagged") {
    Topology topo(4);
    topo.add_edge(0, 1);
    topo.add_edge(2, 3);
    const RouteResult r = min_max_path(topo, Vector(4, 0.1), 0, 3);
    CHECK_FALSE(r.reachable);
}

TEST_CASE("invalid queries throw") {
    Topology topo(2);
    topo.add_edge(0, 1);
    CHECK_THROWS_AS(min_max_path(topo, Vector(2, 0.1), 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(min_max_path(topo, Vector(2, 0.1), 0, 5), std::invalid_argument);
    CHECK_THROWS_AS(min_max_path(topo, Vector(1, 0.1), 0, 1), std::invalid_argument);
}

TEST_CASE("random graphs match exhaustive enumeration, both endpoint modes") {
    Rng rng(1234);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 2 + rng.index(7);  // up to 8 nodes
        const Topology topo = random_connected(rng, n, 0.3);
        // Mix continuous and heavily tied risk values to exercise ties.
        const Vector risks = random_risks(rng, n, trial % 2 ? 3 : 0);
        const std::size_t src = rng.index(n);
        std::size_t dst = rng.index(n);
        if (dst == src) dst = (dst + 1) % n;
        const bool include = trial % 3 != 0;

        const RouteResult got = min_max_path(topo, risks, src, dst, include);
        const test::BruteRoute want =
            test::brute_force_min_max_path(topo, risks, src, dst, include);
        REQUIRE(got.reachable == want.reachable);
        CHECK(got.path_risk == want.path_risk);
        CHECK(got.path == want.path);
    }
}

TEST_CASE("star topology: every destination is a direct hop") {
    const std::size_t n = 6;
    Topology topo(n);
    for (std::size_t v = 1; v < n; ++v) topo.add_edge(0, v);
    Rng rng(55);
    const Vector risks = random_risks(rng, n);
    const std::vector<RouteResult> all = all_min_max_paths(topo, risks, 0);
    for (std::size_t dst = 1; dst < n; ++dst) {
        REQUIRE(all[dst].reachable);
        CHECK(all[dst].path == std::vector<std::size_t>{0, dst});
        CHECK(all[dst].path_risk == doctest::Approx(std::max(risks[0], risks[dst])));
    }
}

TEST_CASE("single-source results agree with per-destination queries") {
    Rng rng(77);
    const std::size_t n = 8;
    const Topology topo = random_connected(rng, n, 0.25);
    const Vector risks = random_risks(rng, n);
    const std::size_t src = 3;
    const std::vector<RouteResult> all = all_min_max_paths(topo, risks, src);
    for (std::size_t dst = 0; dst < n; ++dst) {
        if (dst == src) continue;
        const RouteResult single = min_max_path(topo, risks, src, dst);
        REQUIRE(all[dst].reachable == single.reachable);
        CHECK(all[dst].path == single.path);
        CHECK(all[dst].path_risk == single.path_risk);
    }
}

TEST_CASE("destinations sorted by path risk form a monotone table") {
    Rng rng(88);
    const std::size_t n = 7;
    const Topology topo = random_connected(rng, n, 0.4);
    const Vector risks = random_risks(rng, n);
    std::vector<RouteResult> all = all_min_max_paths(topo, risks, 0);
    std::vector<double> sorted_risks;
    for (std::size_t dst = 1; dst < n; ++dst)
        if (all[dst].reachable) sorted_risks.push_back(all[dst].path_risk);
    std::sort(sorted_risks.begin(), sorted_risks.end());
    for (std::size_t k = 1; k < sorted_risks.size(); ++k)
        CHECK(sorted_risks[k - 1] <= sorted_risks[k]);
}

TEST_CASE("raising an off-path node's risk never improves any route") {
    Rng rng(99);
    const std::size_t n = 7;
    const Topology topo = random_connected(rng, n, 0.3);
    Vector risks = random_risks(rng, n);
    const std::vector<RouteResult> before = all_min_max_paths(topo, risks, 0);

    // Find a node absent from every optimal path.
    std::vector<char> on_path(n, 0);
    for (const RouteResult& r : before)
        for (std::size_t v : r.path) on_path[v] = 1;
    std::size_t bystander = n;
    for (std::size_t v = 1; v < n; ++v)
        if (!on_path[v]) { bystander = v; break; }
    if (bystander == n) return;  // every node used; nothing to vary

    risks[bystander] += 10.0;
    const std::vector<RouteResult> after = all_min_max_paths(topo, risks, 0);
    for (std::size_t dst = 0; dst < n; ++dst) {
        if (!before[dst].reachable) continue;
        CHECK(after[dst].path_risk >= before[dst].path_risk - 1e-12);
        // Routes that already avoided the bystander keep their risk value.
        bool avoided = true;
        for (std::size_t v : before[dst].path) avoided = avoided && v != bystander;
        if (avoided) CHECK(after[dst].path_risk == before[dst].path_risk);
    }
}

TEST_CASE("scaling all risks scales path risks and keeps paths") {
    Rng rng(111);
    const std::size_t n = 8;
    const Topology topo = random_connected(rng, n, 0.3);
    Vector risks = random_risks(rng, n);
    const std::vector<RouteResult> before = all_min_max_paths(topo, risks, 2);
    for (double& r : risks) r *= 3.5;
    const std::vector<RouteResult> after = all_min_max_paths(topo, risks, 2);
    for (std::size_t dst = 0; dst < n; ++dst) {
        if (!before[dst].reachable) continue;
        CHECK(after[dst].path == before[dst].path);
        CHECK(after[dst].path_risk == doctest::Approx(3.5 * before[dst].path_risk).epsilon(1e-12));
    }
}

TEST_CASE("exclusion produces a topology without the node") {
    Topology topo(4);
    topo.add_edge(0, 1);
    topo.add_edge(1, 2);
    topo.add_edge(2, 3);
    topo.add_edge(0, 3);
    const Topology cut = topo.without({3});
    CHECK(cut.neighbors(3).empty());
    const RouteResult r = min_max_path(cut, Vector(4, 0.1), 0, 2);
    REQUIRE(r.reachable);
    CHECK(r.path == std::vector<std::size_t>{0, 1, 2});
}
