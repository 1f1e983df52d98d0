#ifndef NRE_TEST_SUPPORT_HPP
#define NRE_TEST_SUPPORT_HPP

#include "nre/flow_record.hpp"
#include "nre/matrix.hpp"
#include "nre/partition.hpp"
#include "nre/routing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace nre::test {

/// splitmix64: deterministic, seedable, good enough for test data.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

/// Random signal frame values: n rows of len samples in [lo, hi).
inline Matrix random_signals(Rng& rng, std::size_t n, std::size_t len, double lo = -5.0,
                             double hi = 5.0) {
    Matrix m(n, len);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < len; ++k) m(i, k) = rng.uniform(lo, hi);
    return m;
}

/// Random symmetric weight matrix with unit diagonal, off-diagonals in
/// [lo, hi).
inline Matrix random_weights(Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
    Matrix f(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        f(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = rng.uniform(lo, hi);
            f(i, j) = w;
            f(j, i) = w;
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Independent oracles. These re-derive the quantities under test from
// first principles and stay clear of the library's computational paths.
// ---------------------------------------------------------------------------

/// Literal sample-statistics Pearson magnitude: unbiased covariance over
/// the standard deviations, absolute value. Zero-variance rows give 0.
inline Matrix oracle_pearson_abs(const Matrix& signals) {
    const std::size_t n = signals.rows();
    const std::size_t len = signals.cols();
    std::vector<double> mean(n, 0.0), sd(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < len; ++k) mean[i] += signals(i, k);
        mean[i] /= static_cast<double>(len);
        double acc = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            const double d = signals(i, k) - mean[i];
            acc += d * d;
        }
        sd[i] = std::sqrt(acc / static_cast<double>(len - 1));
    }
    Matrix f(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        f(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double w = 0.0;
            if (sd[i] > 0.0 && sd[j] > 0.0) {
                double cov = 0.0;
                for (std::size_t k = 0; k < len; ++k)
                    cov += (signals(i, k) - mean[i]) * (signals(j, k) - mean[j]);
                cov /= static_cast<double>(len - 1);
                w = std::min(std::abs(cov) / (sd[i] * sd[j]), 1.0);
            }
            f(i, j) = w;
            f(j, i) = w;
        }
    }
    return f;
}

/// Ratio-cut objective of a bisection: cut(A,B) * (1/|A| + 1/|B|).
inline double ratio_cut_value(const Matrix& weights, const std::vector<int>& side) {
    const std::size_t n = weights.rows();
    double cut = 0.0;
    std::size_t size_a = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (side[i] == 0) ++size_a;
        for (std::size_t j = i + 1; j < n; ++j)
            if (side[i] != side[j]) cut += weights(i, j);
    }
    const std::size_t size_b = n - size_a;
    if (size_a == 0 || size_b == 0) return std::numeric_limits<double>::infinity();
    return cut * (1.0 / static_cast<double>(size_a) + 1.0 / static_cast<double>(size_b));
}

/// Exhaustive minimum-ratio-cut bisection (n <= ~20). Returns the side
/// labels of one optimum and its objective value.
struct BruteCut {
    std::vector<int> side;
    double ratio_value = 0.0;
    double cut_weight = 0.0;
};

inline BruteCut brute_force_ratio_cut(const Matrix& weights) {
    const std::size_t n = weights.rows();
    BruteCut best;
    best.ratio_value = std::numeric_limits<double>::infinity();
    std::vector<int> side(n, 0);
    // Node 0 pinned to side 0 halves the enumeration.
    const std::uint64_t limit = 1ULL << (n - 1);
    for (std::uint64_t mask = 1; mask < limit; ++mask) {
        for (std::size_t i = 1; i < n; ++i) side[i] = (mask >> (i - 1)) & 1ULL ? 1 : 0;
        const double value = ratio_cut_value(weights, side);
        if (value < best.ratio_value) {
            best.ratio_value = value;
            best.side = side;
        }
    }
    double cut = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (best.side[i] != best.side[j]) cut += weights(i, j);
    best.cut_weight = cut;
    return best;
}

/// Exhaustive min-max simple-path search implementing the stated tie rule:
/// smallest max counted risk, then fewest hops, then lexicographically
/// smallest node sequence.
struct BruteRoute {
    std::vector<std::size_t> path;
    double path_risk = 0.0;
    bool reachable = false;
};

inline void brute_route_walk(const Topology& topo, const Vector& risks, std::size_t dst,
                             bool include_endpoints, std::vector<std::size_t>& path,
                             std::vector<char>& used, BruteRoute& best) {
    const std::size_t cur = path.back();
    if (cur == dst) {
        double key = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < path.size(); ++i) {
            const bool endpoint = (i == 0) || (i + 1 == path.size());
            if (endpoint && !include_endpoints) continue;
            key = std::max(key, risks[path[i]]);
        }
        const double risk = key == -std::numeric_limits<double>::infinity() ? 0.0 : key;
        const std::size_t hops = path.size() - 1;
        bool better = false;
        if (!best.reachable) {
            better = true;
        } else if (risk != best.path_risk) {
            better = risk < best.path_risk;
        } else if (hops != best.path.size() - 1) {
            better = hops < best.path.size() - 1;
        } else {
            better = path < best.path;
        }
        if (better) {
            best.reachable = true;
            best.path = path;
            best.path_risk = risk;
        }
        return;
    }
    for (std::size_t next : topo.neighbors(cur)) {
        if (used[next]) continue;
        used[next] = 1;
        path.push_back(next);
        brute_route_walk(topo, risks, dst, include_endpoints, path, used, best);
        path.pop_back();
        used[next] = 0;
    }
}

inline BruteRoute brute_force_min_max_path(const Topology& topo, const Vector& risks,
                                           std::size_t src, std::size_t dst,
                                           bool include_endpoints = true) {
    BruteRoute best;
    std::vector<std::size_t> path{src};
    std::vector<char> used(topo.node_count(), 0);
    used[src] = 1;
    brute_route_walk(topo, risks, dst, include_endpoints, path, used, best);
    return best;
}

/// Gauss-Jordan inverse with partial pivoting, local to the test oracles.
inline Matrix oracle_inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix m = a;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
        if (std::abs(m(pivot, col)) < 1e-300) throw std::runtime_error("oracle_inverse: singular");
        if (pivot != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(m(pivot, c), m(col, c));
                std::swap(inv(pivot, c), inv(col, c));
            }
        const double scale = m(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            m(col, c) /= scale;
            inv(col, c) /= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = m(r, col);
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                m(r, c) -= factor * m(col, c);
                inv(r, c) -= factor * inv(col, c);
            }
        }
    }
    return inv;
}

// ---------------------------------------------------------------------------
// Synthetic traffic. Every flow draws its attributes from one common
// distribution, so flow-level features carry no class signal; only the
// *timing* differs. Benign behavior is a background rhythm: shared tick
// slots that each entity joins with some probability, which gives every
// window a stable, well-connected benign graph. Attack windows add
// correlated bursts among the designated attacker entities: they all emit
// flows in the same extra slots, which concentrates connectivity (and
// hence predicted risk) on the attacker block for that window.
// ---------------------------------------------------------------------------

struct SynthSpec {
    std::size_t entities = 10;
    std::size_t attackers = 5;  // entities 0..attackers-1 burst together
    double graph_window = 10.0;
    double sync_window = 0.5;
    std::size_t windows = 60;
    int benign_flows_per_entity = 2;   // unstructured flows per window
    double tick_probability = 0.5;     // chance an entity joins a tick slot
    double burst_slot_probability = 0.75;
    std::size_t attack_run = 10;       // attacks come in sustained campaigns
    std::uint64_t seed = 1;

    // Alternating benign/attack campaigns of attack_run windows each, so
    // every chronological split segment sees both classes.
    bool attack_window(std::size_t w) const { return (w / attack_run) % 2 == 1; }
};

inline std::vector<FlowRecord> synthetic_traffic(const SynthSpec& spec) {
    Rng rng(spec.seed);
    std::vector<FlowRecord> flows;
    auto entity_name = [](std::size_t i) { return "10.0.0." + std::to_string(i + 1); };

    auto fill_common = [&](FlowRecord& f) {
        f.fwd_packets = static_cast<double>(rng.uniform_int(1, 20));
        f.bwd_packets = static_cast<double>(rng.uniform_int(1, 20));
        f.fwd_payload_packets = static_cast<double>(rng.uniform_int(0, 10));
        f.duration = rng.uniform(0.05, 2.0);
        f.bytes_per_second = rng.uniform(50.0, 150.0);
        f.fwd_header_bytes = rng.uniform(20.0, 60.0);
        f.active_mean = rng.uniform(0.0, 1.0);
        f.idle_mean = rng.uniform(0.0, 1.0);
        f.fwd_iat_mean = rng.uniform(0.001, 0.1);
        f.bwd_iat_mean = rng.uniform(0.001, 0.1);
        f.fwd_packet_length_mean = rng.uniform(40.0, 1500.0);
        f.src_port = static_cast<double>(rng.uniform_int(1024, 65535));
        f.protocol = rng.uniform() < 0.5 ? 6.0 : 17.0;
    };

    auto emit = [&](double ts, std::size_t src, std::size_t dst, const char* label) {
        FlowRecord f;
        f.timestamp = ts;
        f.src_entity = entity_name(src);
        f.dst_entity = entity_name(dst);
        fill_common(f);
        f.label = label;
        flows.push_back(std::move(f));
    };

    const std::size_t slots = static_cast<std::size_t>(spec.graph_window / spec.sync_window);

    for (std::size_t w = 0; w < spec.windows; ++w) {
        const double start = static_cast<double>(w) * spec.graph_window;
        const bool attack = spec.attack_window(w);
        const char* label = attack ? "Burst" : "BENIGN";

        // Background rhythm: every second slot is a tick each entity joins
        // with tick_probability, talking to a random peer.
        for (std::size_t slot = 0; slot < slots; slot += 2) {
            const double tick_time = start + (static_cast<double>(slot) + 0.25) * spec.sync_window;
            for (std::size_t e = 0; e < spec.entities; ++e) {
                if (rng.uniform() >= spec.tick_probability) continue;
                std::size_t peer = rng.index(spec.entities);
                if (peer == e) peer = (peer + 1) % spec.entities;
                emit(tick_time, e, peer, "BENIGN");
            }
        }

        // Unstructured noise flows at arbitrary times.
        for (std::size_t e = 0; e < spec.entities; ++e) {
            for (int k = 0; k < spec.benign_flows_per_entity; ++k) {
                std::size_t peer = rng.index(spec.entities);
                if (peer == e) peer = (peer + 1) % spec.entities;
                emit(start + rng.uniform(0.0, spec.graph_window), e, peer, "BENIGN");
            }
        }

        // Correlated bursts: in attack windows the attackers all fire in
        // the same (odd, off-tick) slots.
        if (attack) {
            for (std::size_t slot = 1; slot < slots; slot += 2) {
                if (rng.uniform() >= spec.burst_slot_probability) continue;
                const double burst_time =
                    start + (static_cast<double>(slot) + 0.5) * spec.sync_window;
                for (std::size_t a = 0; a < spec.attackers; ++a)
                    emit(burst_time, a, (a + 1) % spec.attackers, label);
            }
        }
    }
    return flows;
}

inline Matrix oracle_matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
}

/// Batch linear-Gaussian conditioning oracle for the risk recursion.
/// Builds the joint covariance of the state trajectory and all
/// measurements from the state-space model, then conditions the final
/// state on the stacked measurement vector.
struct JointGaussianOracle {
    // One filtering problem: x_0 ~ N(prior_mean, prior_cov);
    // x_{k+1} = F_k x_k + w_k, w_k ~ N(0, Q_k);
    // at each step k >= 1 optionally z_k = H_k x_k + v_k.
    struct Step {
        Matrix f;                         // n x n
        Vector q;                         // diagonal of Q
        std::vector<std::size_t> measured;  // measured entity indices (may be empty)
        Vector z;                         // measured values
        Vector r;                         // measurement variances
    };

    Vector prior_mean;
    Matrix prior_cov;
    std::vector<Step> steps;

    struct Result {
        Vector mean;
        Matrix cov;
    };

    Result posterior_final() const {
        const std::size_t n = prior_mean.size();
        const std::size_t horizon = steps.size();

        // State transition products: A_k = F_{k-1} ... F_0 (A_0 = I), and
        // noise injection B_{k,j} = F_{k-1} ... F_{j+1} for w_j entering
        // x_{k} (j < k).
        std::vector<Matrix> a(horizon + 1);
        a[0] = Matrix::identity(n);
        for (std::size_t k = 0; k < horizon; ++k) a[k + 1] = oracle_matmul(steps[k].f, a[k]);

        // cov(x_s, x_t) = A_s P0 A_t^T + sum_{j < min(s,t)} B_{s,j} Q_j B_{t,j}^T
        auto b_factor = [&](std::size_t k, std::size_t j) {
            Matrix m = Matrix::identity(n);
            for (std::size_t i = j + 1; i < k; ++i) m = oracle_matmul(steps[i].f, m);
            return m;
        };
        auto cov_xx = [&](std::size_t s, std::size_t t) {
            Matrix c = oracle_matmul(oracle_matmul(a[s], prior_cov), transpose(a[t]));
            const std::size_t cap = std::min(s, t);
            for (std::size_t j = 0; j < cap; ++j) {
                const Matrix bs = b_factor(s, j);
                const Matrix bt = b_factor(t, j);
                Matrix bq = bs;  // bs * diag(q_j)
                for (std::size_t row = 0; row < n; ++row)
                    for (std::size_t col = 0; col < n; ++col) bq(row, col) *= steps[j].q[col];
                c = c + oracle_matmul(bq, transpose(bt));
            }
            return c;
        };

        // Mean trajectory.
        std::vector<Vector> mean(horizon + 1);
        mean[0] = prior_mean;
        for (std::size_t k = 0; k < horizon; ++k) {
            mean[k + 1].assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    mean[k + 1][i] += steps[k].f(i, j) * mean[k][j];
        }

        // Stacked measurement indexing.
        struct MeasRef {
            std::size_t step;
            std::size_t row;  // position within that step's batch
        };
        std::vector<MeasRef> refs;
        for (std::size_t k = 0; k < horizon; ++k)
            for (std::size_t r = 0; r < steps[k].measured.size(); ++r) refs.push_back({k + 1, r});
        const std::size_t m = refs.size();

        Result out;
        if (m == 0) {
            out.mean = mean[horizon];
            out.cov = cov_xx(horizon, horizon);
            return out;
        }

        auto entity_of = [&](const MeasRef& ref) {
            return steps[ref.step - 1].measured[ref.row];
        };

        Matrix czz(m, m);
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = 0; q < m; ++q) {
                const Matrix c = cov_xx(refs[p].step, refs[q].step);
                double v = c(entity_of(refs[p]), entity_of(refs[q]));
                if (p == q) v += steps[refs[p].step - 1].r[refs[p].row];
                czz(p, q) = v;
            }

        Matrix cxz(n, m);
        for (std::size_t p = 0; p < m; ++p) {
            const Matrix c = cov_xx(horizon, refs[p].step);
            for (std::size_t i = 0; i < n; ++i) cxz(i, p) = c(i, entity_of(refs[p]));
        }

        Vector innovation(m);
        for (std::size_t p = 0; p < m; ++p) {
            const std::size_t k = refs[p].step;
            innovation[p] =
                steps[k - 1].z[refs[p].row] - mean[k][entity_of(refs[p])];
        }

        const Matrix czz_inv = oracle_inverse(czz);
        const Matrix gain = oracle_matmul(cxz, czz_inv);  // n x m

        out.mean = mean[horizon];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t p = 0; p < m; ++p) out.mean[i] += gain(i, p) * innovation[p];

        out.cov = cov_xx(horizon, horizon) - oracle_matmul(gain, transpose(cxz));
        return out;
    }
};

} // namespace nre::test

#endif
