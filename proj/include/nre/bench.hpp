#ifndef NRE_BENCH_HPP
#define NRE_BENCH_HPP

#include "nre/flow_ingest.hpp"
#include "nre/matrix.hpp"
#include "nre/signal_sync.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nre {

/// Window labels for network-state classification: a window is ATTACK when
/// any of its flows carries an attack label, BENIGN otherwise.
/// Windows are the same gapless [t0 + w*tau, t0 + (w+1)*tau) grid the
/// streaming run uses. Throws when no flow carries a label at all.
std::vector<int> label_windows(std::span<const FlowRecord> flows, double graph_window);

/// Two-class Gaussian naive Bayes on dense feature rows. Scores are
/// log-posterior differences (positive class minus negative), so ranking
/// is threshold-free and invariant to uniform feature scaling.
class GaussianNb {
public:
    /// Fits per-class, per-feature Gaussians. Per-feature variances are
    /// floored at 1e-9 times the mean pooled feature variance. Throws when
    /// a class is absent from the training labels.
    static GaussianNb fit(const Matrix& features, const std::vector<int>& labels);

    double score(const double* features) const;
    Vector score_all(const Matrix& features) const;

private:
    Vector mean_[2];
    Vector var_[2];
    double log_prior_[2] = {0.0, 0.0};
    std::size_t dim_ = 0;
};

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Empirical ROC from a threshold sweep over the distinct scores, with
/// trapezoid AUC. Thresholds classify score >= threshold as positive.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// Throws when either class is absent.
RocCurve roc(const Vector& scores, const std::vector<int>& labels);

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

double balanced_accuracy(const Confusion& c);

/// Maximum balanced accuracy across the ROC threshold sweep (extreme
/// thresholds included, so the result is never below 0.5).
double peak_balanced_accuracy(const Vector& scores, const std::vector<int>& labels);

/// Flow attributes that feed a connection parameter, in the order used for
/// the flow-level (FBNSI) feature space: one or two dimensions.
std::vector<double> flow_features(const FlowRecord& flow, ConnParam param);
std::vector<std::string> flow_feature_names(ConnParam param);

/// Flow-level classifier for the FBNSI baseline: Gaussian NB over the
/// connection parameter's flow attributes, trained on individually
/// labeled flows.
class FbnsiModel {
public:
    static FbnsiModel train(std::span<const FlowRecord> flows, ConnParam param);

    /// Fraction of the window's flows classified as attack; this fraction
    /// is the likelihood that the window's network state is ATTACK. Empty
    /// windows score 0 and set `empty`.
    struct Score {
        double likelihood = 0.0;
        bool empty = false;
    };
    Score score_window(std::span<const FlowRecord> window_flows) const;

private:
    GaussianNb classifier_;
    ConnParam param_ = ConnParam::NumPacketsSent;
};

struct RunConfig;  // pipeline.hpp

/// Per-window mean-risk features from a measurement-free streaming run:
/// one row per window, one column per entity (group vectors concatenated
/// in global index order).
struct NreFeatures {
    Matrix features;  // windows x entities
    std::vector<double> window_end;
};

struct MethodEval {
    RocCurve val_roc;
    RocCurve test_roc;
    double val_auc = 0.0;
    double test_auc = 0.0;
    double val_peak_ba = 0.0;
    double test_peak_ba = 0.0;
};

/// Head-to-head network-state classification on one labeled flow set:
/// risk-vector features (measurement-free run + Gaussian NB) against the
/// FBNSI attack-flow-fraction baseline, chronological train/val/test
/// split. Throws when the training span lacks a class.
struct BenchComparison {
    ConnParam param = ConnParam::NumPacketsReceived;
    std::size_t windows = 0;
    std::size_t attack_windows = 0;
    std::size_t train_windows = 0;
    std::size_t val_windows = 0;
    MethodEval nre;
    MethodEval fbnsi;
};

BenchComparison bench_compare(std::span<const FlowRecord> flows, const RunConfig& config,
                              ConnParam param);

} // namespace nre

#endif
