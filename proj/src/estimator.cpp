#include "nre/estimator.hpp"

#include "nre/linalg.hpp"
#include "nre/log.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace nre {

NoiseModel NoiseModel::uniform(std::size_t n, double q) {
    if (q < 0.0) throw std::invalid_argument("process noise must be nonnegative");
    NoiseModel m;
    m.process_noise.assign(n, q);
    return m;
}

RiskState init_state(std::size_t n, double prior_mean, double prior_var) {
    if (n < 1) throw std::invalid_argument("init_state: need at least one entity");
    if (prior_var < 0.0) throw std::invalid_argument("init_state: variance must be nonnegative");
    RiskState s;
    s.mean.assign(n, prior_mean);
    s.cov = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) s.cov(i, i) = prior_var;
    s.time = 0.0;
    return s;
}

RiskState predict(const RiskState& state, const Matrix& weights, double graph_window,
                  const NoiseModel& noise, kernels::Exec mode) {
    const std::size_t n = state.size();
    if (weights.rows() != n || weights.cols() != n || noise.process_noise.size() != n)
        throw std::invalid_argument("predict: dimension mismatch");
    RiskState out;
    out.mean = kernels::matvec(weights, state.mean, mode);
    out.cov = kernels::propagate_covariance(weights, state.cov, noise.process_noise, mode);
    symmetrize(out.cov);
    out.time = state.time + graph_window;
    return out;
}

RiskState predict(const RiskState& state, const ConnectivityGraph& graph,
                  const NoiseModel& noise) {
    return predict(state, graph.weights, graph.graph_window, noise, kernels::default_exec());
}

RiskState update(const RiskState& prior, const MeasurementBatch& batch) {
    const std::size_t n = prior.size();
    const std::size_t m = batch.items.size();
    if (m == 0) return prior;

    std::set<std::size_t> seen;
    for (const Measurement& item : batch.items) {
        if (item.entity >= n) throw std::invalid_argument("update: entity index out of range");
        if (!seen.insert(item.entity).second)
            throw std::invalid_argument("update: duplicate entity in measurement batch");
        if (item.variance < 0.0)
            throw std::invalid_argument("update: negative measurement variance");
    }

    // S = H P H^T + R restricted to the measured entities.
    Matrix s(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            s(a, b) = prior.cov(batch.items[a].entity, batch.items[b].entity);
    for (std::size_t a = 0; a < m; ++a) s(a, a) += batch.items[a].variance;

    double trace = 0.0;
    for (std::size_t a = 0; a < m; ++a) trace += s(a, a);
    const double pivot_floor = 1e-12 * trace / static_cast<double>(m);

    // P H^T: the measured columns of P.
    Matrix pht(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a) pht(i, a) = prior.cov(i, batch.items[a].entity);

    // Gain K = P H^T S^{-1}, via SPD solve of S X = (P H^T)^T.
    Matrix gain(n, m);
    const Cholesky factor = cholesky(s);
    if (factor.ok && factor.min_pivot >= pivot_floor) {
        const Matrix x = chol_solve(factor.lower, transpose(pht));  // m x n
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < m; ++a) gain(i, a) = x(a, i);
    } else {
        warn("estimator: innovation covariance numerically singular, using pseudo-inverse");
        const Matrix sinv = pinv_sym(s, std::max(pivot_floor, 0.0));
        gain = kernels::matmul(pht, sinv, kernels::Exec::Serial);
    }

    // Innovation z - H x.
    Vector innovation(m);
    for (std::size_t a = 0; a < m; ++a)
        innovation[a] = batch.items[a].value - prior.mean[batch.items[a].entity];

    RiskState out;
    out.time = prior.time;
    out.mean = prior.mean;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a) out.mean[i] += gain(i, a) * innovation[a];

    // P' = P - K S K^T, re-symmetrized against round-off drift.
    const Matrix ks = kernels::matmul(gain, s, kernels::Exec::Serial);
    out.cov = prior.cov;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t a = 0; a < m; ++a) acc += ks(i, a) * gain(j, a);
            out.cov(i, j) -= acc;
        }
    symmetrize(out.cov);
    return out;
}

RiskState relieve(const RiskState& state, double relief_factor) {
    if (relief_factor < 0.0 || relief_factor >= 1.0)
        throw std::invalid_argument("relief factor must lie in [0, 1)");
    const double keep = 1.0 - relief_factor;
    RiskState out = state;
    for (double& v : out.mean) v *= keep;
    for (std::size_t i = 0; i < out.cov.rows() * out.cov.cols(); ++i)
        out.cov.data()[i] *= keep * keep;
    return out;
}

double relief_rule_of_thumb(double lambda_max) {
    if (lambda_max < 1.0)
        throw std::invalid_argument("relief_rule_of_thumb: lambda_max must be >= 1");
    return 1.0 - 1.0 / lambda_max;
}

RiskState step(const RiskState& state, const Matrix& weights, double graph_window,
               const std::optional<MeasurementBatch>& batch, const NoiseModel& noise,
               double relief_factor, kernels::Exec mode) {
    RiskState prior = predict(state, weights, graph_window, noise, mode);
    RiskState posterior = batch ? update(prior, *batch) : prior;
    return relieve(posterior, relief_factor);
}

RiskState step(const RiskState& state, const ConnectivityGraph& graph,
               const std::optional<MeasurementBatch>& batch, const NoiseModel& noise,
               double relief_factor) {
    return step(state, graph.weights, graph.graph_window, batch, noise, relief_factor,
                kernels::default_exec());
}

} // namespace nre
