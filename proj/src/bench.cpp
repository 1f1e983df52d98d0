#include "nre/bench.hpp"

#include "nre/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nre {

std::vector<int> label_windows(std::span<const FlowRecord> flows, double graph_window) {
    if (graph_window <= 0.0) throw std::invalid_argument("label_windows: window must be positive");
    if (flows.empty()) throw std::invalid_argument("label_windows: no flows");

    bool any_label = false;
    double t0 = std::numeric_limits<double>::infinity();
    double t_last = -std::numeric_limits<double>::infinity();
    for (const FlowRecord& f : flows) {
        any_label = any_label || f.label.has_value();
        t0 = std::min(t0, f.timestamp);
        t_last = std::max(t_last, f.timestamp);
    }
    if (!any_label) throw std::runtime_error("label_windows: dataset carries no labels");

    const std::size_t windows =
        static_cast<std::size_t>(std::floor((t_last - t0) / graph_window)) + 1;
    std::vector<int> labels(windows, 0);
    for (const FlowRecord& f : flows) {
        if (!f.is_attack()) continue;
        std::size_t w = static_cast<std::size_t>(std::floor((f.timestamp - t0) / graph_window));
        if (w >= windows) w = windows - 1;
        labels[w] = 1;
    }
    return labels;
}

GaussianNb GaussianNb::fit(const Matrix& features, const std::vector<int>& labels) {
    const std::size_t rows = features.rows();
    const std::size_t dim = features.cols();
    if (labels.size() != rows) throw std::invalid_argument("gaussian_nb: label count mismatch");

    std::size_t count[2] = {0, 0};
    for (int y : labels) {
        if (y != 0 && y != 1) throw std::invalid_argument("gaussian_nb: labels must be 0/1");
        ++count[y];
    }
    if (count[0] == 0 || count[1] == 0)
        throw std::invalid_argument("gaussian_nb: both classes required in training data");

    GaussianNb model;
    model.dim_ = dim;
    for (int c = 0; c < 2; ++c) {
        model.mean_[c].assign(dim, 0.0);
        model.var_[c].assign(dim, 0.0);
        model.log_prior_[c] =
            std::log(static_cast<double>(count[c]) / static_cast<double>(rows));
    }
    for (std::size_t i = 0; i < rows; ++i) {
        const int c = labels[i];
        for (std::size_t j = 0; j < dim; ++j) model.mean_[c][j] += features(i, j);
    }
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < dim; ++j) model.mean_[c][j] /= static_cast<double>(count[c]);
    for (std::size_t i = 0; i < rows; ++i) {
        const int c = labels[i];
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = features(i, j) - model.mean_[c][j];
            model.var_[c][j] += d * d;
        }
    }
    double pooled = 0.0;
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < dim; ++j) pooled += model.var_[c][j];
    pooled /= static_cast<double>(rows) * static_cast<double>(std::max<std::size_t>(dim, 1));
    double floor = 1e-9 * pooled;
    if (floor <= 0.0) floor = 1e-9;
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < dim; ++j) {
            model.var_[c][j] /= static_cast<double>(count[c]);
            model.var_[c][j] = std::max(model.var_[c][j], floor);
        }
    return model;
}

double GaussianNb::score(const double* features) const {
    double s = log_prior_[1] - log_prior_[0];
    for (std::size_t j = 0; j < dim_; ++j) {
        const double d1 = features[j] - mean_[1][j];
        const double d0 = features[j] - mean_[0][j];
        s += -0.5 * (std::log(2.0 * M_PI * var_[1][j]) + d1 * d1 / var_[1][j]);
        s -= -0.5 * (std::log(2.0 * M_PI * var_[0][j]) + d0 * d0 / var_[0][j]);
    }
    return s;
}

Vector GaussianNb::score_all(const Matrix& features) const {
    if (features.cols() != dim_) throw std::invalid_argument("gaussian_nb: feature dim mismatch");
    Vector out(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) out[i] = score(features.row(i));
    return out;
}

RocCurve roc(const Vector& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc: size mismatch");
    std::size_t pos = 0, neg = 0;
    for (int y : labels) (y == 1 ? pos : neg) += 1;
    if (pos == 0 || neg == 0) throw std::invalid_argument("roc: both classes required");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // Consume the whole tie group so equal scores share one point.
        while (i < order.size() && scores[order[i]] == threshold) {
            (labels[order[i]] == 1 ? tp : fp) += 1;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(neg);
        const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
        curve.points.push_back({threshold, fpr, tpr});
        auc += 0.5 * (fpr - prev_fpr) * (tpr + prev_tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curve.auc = auc;
    return curve;
}

double balanced_accuracy(const Confusion& c) {
    const double tpr = (c.tp + c.fn) == 0
                           ? 0.0
                           : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double tnr = (c.tn + c.fp) == 0
                           ? 0.0
                           : static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    return 0.5 * (tpr + tnr);
}

double peak_balanced_accuracy(const Vector& scores, const std::vector<int>& labels) {
    const RocCurve curve = roc(scores, labels);
    std::size_t pos = 0, neg = 0;
    for (int y : labels) (y == 1 ? pos : neg) += 1;
    double best = 0.0;
    for (const RocPoint& p : curve.points) {
        // BA = (TPR + TNR) / 2 straight from the curve coordinates.
        best = std::max(best, 0.5 * (p.tpr + (1.0 - p.fpr)));
    }
    return best;
}

std::vector<std::string> flow_feature_names(ConnParam param) {
    switch (param) {
        case ConnParam::Activation: return {};
        case ConnParam::ActiveTime: return {"active_mean"};
        case ConnParam::FlowDuration: return {"duration"};
        case ConnParam::FlowSpeed: return {"bytes_per_second"};
        case ConnParam::HeaderLength: return {"fwd_header_bytes"};
        case ConnParam::IdleTime: return {"idle_mean"};
        case ConnParam::NumActivePackets: return {"fwd_payload_packets"};
        case ConnParam::NumPacketsReceived: return {"fwd_packets", "bwd_packets"};
        case ConnParam::NumPacketsSent: return {"fwd_packets", "bwd_packets"};
        case ConnParam::PacketDelay: return {"fwd_iat_mean", "bwd_iat_mean"};
        case ConnParam::PacketLength: return {"fwd_packet_length_mean"};
        case ConnParam::PortNumber: return {"src_port"};
        case ConnParam::Protocol: return {"protocol"};
        case ConnParam::ResponseTime: return {"bwd_iat_mean", "fwd_iat_mean"};
    }
    return {};
}

std::vector<double> flow_features(const FlowRecord& flow, ConnParam param) {
    switch (param) {
        case ConnParam::Activation: return {};
        case ConnParam::ActiveTime: return {flow.active_mean};
        case ConnParam::FlowDuration: return {flow.duration};
        case ConnParam::FlowSpeed: return {flow.bytes_per_second};
        case ConnParam::HeaderLength: return {flow.fwd_header_bytes};
        case ConnParam::IdleTime: return {flow.idle_mean};
        case ConnParam::NumActivePackets: return {flow.fwd_payload_packets};
        case ConnParam::NumPacketsReceived: return {flow.fwd_packets, flow.bwd_packets};
        case ConnParam::NumPacketsSent: return {flow.fwd_packets, flow.bwd_packets};
        case ConnParam::PacketDelay: return {flow.fwd_iat_mean, flow.bwd_iat_mean};
        case ConnParam::PacketLength: return {flow.fwd_packet_length_mean};
        case ConnParam::PortNumber: return {flow.src_port};
        case ConnParam::Protocol: return {flow.protocol};
        case ConnParam::ResponseTime: return {flow.bwd_iat_mean, flow.fwd_iat_mean};
    }
    return {};
}

FbnsiModel FbnsiModel::train(std::span<const FlowRecord> flows, ConnParam param) {
    if (param == ConnParam::Activation)
        throw std::invalid_argument("fbnsi: Activation has no flow-level feature");
    std::vector<const FlowRecord*> labeled;
    for (const FlowRecord& f : flows)
        if (f.label.has_value()) labeled.push_back(&f);
    if (labeled.empty()) throw std::runtime_error("fbnsi: no labeled flows to train on");

    const std::size_t dim = flow_feature_names(param).size();
    Matrix features(labeled.size(), dim);
    std::vector<int> labels(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        const std::vector<double> row = flow_features(*labeled[i], param);
        for (std::size_t j = 0; j < dim; ++j) features(i, j) = row[j];
        labels[i] = labeled[i]->is_attack() ? 1 : 0;
    }
    FbnsiModel model;
    model.param_ = param;
    model.classifier_ = GaussianNb::fit(features, labels);
    return model;
}

FbnsiModel::Score FbnsiModel::score_window(std::span<const FlowRecord> window_flows) const {
    Score s;
    if (window_flows.empty()) {
        s.empty = true;
        return s;
    }
    std::size_t flagged = 0;
    for (const FlowRecord& f : window_flows) {
        const std::vector<double> row = flow_features(f, param_);
        if (classifier_.score(row.data()) > 0.0) ++flagged;
    }
    s.likelihood = static_cast<double>(flagged) / static_cast<double>(window_flows.size());
    return s;
}

namespace {

MethodEval evaluate_splits(const Vector& scores, const std::vector<int>& labels,
                           std::size_t train_end, std::size_t val_end) {
    MethodEval eval;
    Vector val_scores(scores.begin() + train_end, scores.begin() + val_end);
    std::vector<int> val_labels(labels.begin() + train_end, labels.begin() + val_end);
    Vector test_scores(scores.begin() + val_end, scores.end());
    std::vector<int> test_labels(labels.begin() + val_end, labels.end());

    eval.val_roc = roc(val_scores, val_labels);
    eval.val_auc = eval.val_roc.auc;
    eval.val_peak_ba = peak_balanced_accuracy(val_scores, val_labels);
    eval.test_roc = roc(test_scores, test_labels);
    eval.test_auc = eval.test_roc.auc;
    eval.test_peak_ba = peak_balanced_accuracy(test_scores, test_labels);
    return eval;
}

} // namespace

BenchComparison bench_compare(std::span<const FlowRecord> flows, const RunConfig& config,
                              ConnParam param) {
    if (param == ConnParam::Activation)
        throw std::invalid_argument("bench: Activation is unavailable to the flow-level baseline");
    if (flows.empty()) throw std::invalid_argument("bench: no flows");

    const double tau = config.graph_window;
    const std::vector<int> labels = label_windows(flows, tau);
    const std::size_t windows = labels.size();

    const std::size_t train_end = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(config.train_fraction * static_cast<double>(windows))));
    const std::size_t val_end =
        std::min(windows - 1,
                 train_end + std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(
                                                          config.val_fraction *
                                                          static_cast<double>(windows)))));
    if (train_end >= val_end || val_end >= windows)
        throw std::invalid_argument("bench: too few windows for a train/val/test split");

    // --- NRE features: measurement-free run over the offline partition.
    RunConfig run = config;
    run.param = param;
    const OfflineResult offline = offline_partition(flows, run);
    std::vector<FlowRecord> flow_copy(flows.begin(), flows.end());
    const StreamResult stream = run_stream(std::move(flow_copy), {}, run, offline.entities,
                                           offline.partition);
    if (stream.snapshots.size() != windows)
        throw std::runtime_error("bench: window grids of labels and stream disagree");

    const std::size_t n = offline.entities->size();
    Matrix features(windows, n);
    for (std::size_t w = 0; w < windows; ++w)
        for (std::size_t i = 0; i < n; ++i) features(w, i) = stream.snapshots[w].mean[i];

    Matrix train_features(train_end, n);
    std::vector<int> train_labels(labels.begin(), labels.begin() + train_end);
    for (std::size_t w = 0; w < train_end; ++w)
        for (std::size_t i = 0; i < n; ++i) train_features(w, i) = features(w, i);

    const GaussianNb nre_model = GaussianNb::fit(train_features, train_labels);
    const Vector nre_scores = nre_model.score_all(features);

    // --- FBNSI baseline: flow-level classifier on the training windows.
    double t0 = std::numeric_limits<double>::infinity();
    for (const FlowRecord& f : flows) t0 = std::min(t0, f.timestamp);
    auto window_of = [&](double ts) {
        std::size_t w = static_cast<std::size_t>(std::floor((ts - t0) / tau));
        return std::min(w, windows - 1);
    };

    std::vector<FlowRecord> train_flows;
    std::vector<std::vector<FlowRecord>> per_window(windows);
    for (const FlowRecord& f : flows) {
        const std::size_t w = window_of(f.timestamp);
        if (w < train_end) train_flows.push_back(f);
        per_window[w].push_back(f);
    }
    const FbnsiModel fbnsi = FbnsiModel::train(train_flows, param);
    Vector fbnsi_scores(windows, 0.0);
    for (std::size_t w = 0; w < windows; ++w)
        fbnsi_scores[w] = fbnsi.score_window(per_window[w]).likelihood;

    BenchComparison out;
    out.param = param;
    out.windows = windows;
    for (int y : labels) out.attack_windows += static_cast<std::size_t>(y);
    out.train_windows = train_end;
    out.val_windows = val_end - train_end;
    out.nre = evaluate_splits(nre_scores, labels, train_end, val_end);
    out.fbnsi = evaluate_splits(fbnsi_scores, labels, train_end, val_end);
    return out;
}

} // namespace nre
