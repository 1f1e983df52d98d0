#ifndef NRE_ESTIMATOR_HPP
#define NRE_ESTIMATOR_HPP

#include "nre/connectivity.hpp"
#include "nre/matrix.hpp"

#include <optional>
#include <vector>

namespace nre {

/// Gaussian risk distribution over one entity group: mean vector and error
/// covariance (symmetric PSD), both in risk units.
struct RiskState {
    Vector mean;
    Matrix cov;
    double time = 0.0;

    std::size_t size() const { return mean.size(); }
};

struct Measurement {
    std::size_t entity = 0;   // index within the state
    double value = 0.0;       // risk units
    double variance = 0.0;    // >= 0; 0 means an exact measurement
};

/// Sparse risk observations applied at one update step. Entity indices
/// must be distinct and in range.
struct MeasurementBatch {
    std::vector<Measurement> items;
    double time = 0.0;
};

/// Diagonal process noise added at every prediction.
struct NoiseModel {
    Vector process_noise;  // diagonal of Q

    static NoiseModel uniform(std::size_t n, double q);
};

/// Uniform prior: mean = prior_mean * 1, covariance = prior_var * I.
RiskState init_state(std::size_t n, double prior_mean, double prior_var);

/// A-priori state: mean propagated through the connectivity weights,
/// covariance propagated as F P F^T + Q. Advances time by the graph
/// window.
RiskState predict(const RiskState& state, const ConnectivityGraph& graph, const NoiseModel& noise);
RiskState predict(const RiskState& state, const Matrix& weights, double graph_window,
                  const NoiseModel& noise, kernels::Exec mode);

/// A-posteriori state from the innovation-gain correction. An empty batch
/// returns the prior unchanged. A numerically singular innovation
/// covariance falls back to an eigenvalue-thresholded pseudo-inverse with
/// a warning.
RiskState update(const RiskState& prior, const MeasurementBatch& batch);

/// Scales mean by (1 - relief_factor) and covariance by its square, making
/// unobserved risks decay. relief_factor in [0, 1).
RiskState relieve(const RiskState& state, double relief_factor);

/// relief factor that keeps risk norms bounded: 1 - 1/lambda_max.
double relief_rule_of_thumb(double lambda_max);

/// predict -> update (empty batch when none) -> relieve.
RiskState step(const RiskState& state, const ConnectivityGraph& graph,
               const std::optional<MeasurementBatch>& batch, const NoiseModel& noise,
               double relief_factor);
RiskState step(const RiskState& state, const Matrix& weights, double graph_window,
               const std::optional<MeasurementBatch>& batch, const NoiseModel& noise,
               double relief_factor, kernels::Exec mode);

} // namespace nre

#endif
