#include "nre/pipeline.hpp"

#include "nre/log.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nre {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double to_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + value +
                                    "'");
    }
}

bool to_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: key '" + key + "' expects true/false, got '" + value +
                                "'");
}

} // namespace

RunConfig config_from_map(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    bool prior_var_set = false;
    for (const auto& [key, value] : kv) {
        if (key.rfind("schema.", 0) == 0) {
            const std::string field = key.substr(7);
            if (c.schema.find(field) == c.schema.end())
                throw std::invalid_argument("config: unknown schema field '" + field + "'");
            c.schema[field] = value;
        } else if (key == "param") {
            const std::optional<ConnParam> p = parse_param(value);
            if (!p) throw std::invalid_argument("config: unknown connection parameter '" + value + "'");
            c.param = *p;
        } else if (key == "sync_window") {
            c.sync_window = to_double(value, key);
        } else if (key == "graph_window") {
            c.graph_window = to_double(value, key);
        } else if (key == "forget_factor") {
            c.forget_factor = to_double(value, key);
        } else if (key == "relief_factor") {
            if (value == "auto") {
                c.relief_auto = true;
            } else {
                c.relief_auto = false;
                c.relief_factor = to_double(value, key);
            }
        } else if (key == "relief_scale") {
            c.relief_scale = to_double(value, key);
        } else if (key == "process_noise") {
            c.process_noise = to_double(value, key);
        } else if (key == "prior_mean") {
            c.prior_mean = to_double(value, key);
        } else if (key == "prior_var") {
            c.prior_var = to_double(value, key);
            prior_var_set = true;
        } else if (key == "max_group_size") {
            const double v = to_double(value, key);
            if (v < 1.0 || v != std::floor(v))
                throw std::invalid_argument("config: max_group_size must be a positive integer");
            c.max_group_size = static_cast<std::size_t>(v);
        } else if (key == "offline_sync_window") {
            c.offline_sync_window = to_double(value, key);
        } else if (key == "delimiter") {
            if (value.size() != 1)
                throw std::invalid_argument("config: delimiter must be one character");
            c.delimiter = value[0];
        } else if (key == "flows") {
            c.flows_path = value;
        } else if (key == "measurements") {
            c.measurements_path = value;
        } else if (key == "topology") {
            c.topology_path = value;
        } else if (key == "partition") {
            c.partition_path = value;
        } else if (key == "out_dir") {
            c.out_dir = value;
        } else if (key == "dump_covariance") {
            c.dump_covariance = to_bool(value, key);
        } else if (key == "train_fraction") {
            c.train_fraction = to_double(value, key);
        } else if (key == "val_fraction") {
            c.val_fraction = to_double(value, key);
        } else {
            warn("config: ignoring unknown key '" + key + "'");
        }
    }
    if (!prior_var_set) c.prior_var = c.process_noise;
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) { return config_from_map(read_key_value(path)); }

void validate(const RunConfig& c) {
    if (c.sync_window <= 0.0) throw std::invalid_argument("config: sync_window must be positive");
    if (c.graph_window < c.sync_window)
        throw std::invalid_argument("config: graph_window must be at least sync_window");
    if (c.graph_window / c.sync_window < 2.0)
        throw std::invalid_argument("config: graph_window must span at least 2 sync windows");
    if (c.forget_factor < 0.0 || c.forget_factor > 1.0)
        throw std::invalid_argument("config: forget_factor must lie in [0, 1]");
    if (!c.relief_auto && (c.relief_factor < 0.0 || c.relief_factor >= 1.0))
        throw std::invalid_argument("config: relief_factor must lie in [0, 1)");
    if (c.relief_scale <= 0.0 || c.relief_scale > 1.0)
        throw std::invalid_argument("config: relief_scale must lie in (0, 1]");
    if (c.process_noise < 0.0)
        throw std::invalid_argument("config: process_noise must be nonnegative");
    if (c.prior_var < 0.0) throw std::invalid_argument("config: prior_var must be nonnegative");
    if (c.max_group_size < 1)
        throw std::invalid_argument("config: max_group_size must be at least 1");
    if (c.offline_sync_window < 0.0)
        throw std::invalid_argument("config: offline_sync_window must be nonnegative");
    if (c.train_fraction <= 0.0 || c.val_fraction < 0.0 ||
        c.train_fraction + c.val_fraction >= 1.0)
        throw std::invalid_argument("config: split fractions must leave room for a test set");
}

std::vector<FlowRecord> load_flows(const RunConfig& config) {
    if (config.flows_path.empty()) throw std::runtime_error("no flow file configured");
    ParseResult parsed = parse_flows_file(config.flows_path, config.schema, config.delimiter);
    if (parsed.rows_skipped > 0)
        warn("flow ingest: skipped " + std::to_string(parsed.rows_skipped) + " of " +
             std::to_string(parsed.rows_total) + " rows");
    if (parsed.records.empty()) throw std::runtime_error("flow file has no valid records");
    normalize_timestamps(parsed.records);
    return std::move(parsed.records);
}

OfflineResult offline_partition(std::span<const FlowRecord> flows, const RunConfig& config) {
    if (flows.empty()) throw std::invalid_argument("offline_partition: no flows");

    double t0 = std::numeric_limits<double>::infinity();
    double t_last = -std::numeric_limits<double>::infinity();
    for (const FlowRecord& f : flows) {
        t0 = std::min(t0, f.timestamp);
        t_last = std::max(t_last, f.timestamp);
    }
    const double delta =
        config.offline_sync_window > 0.0 ? config.offline_sync_window : config.sync_window;
    // One graph over the full span: enough whole slots to cover the last
    // flow, and at least two samples.
    const std::size_t samples =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::floor((t_last - t0) / delta)) + 1);
    const double span = static_cast<double>(samples) * delta;

    OfflineResult out;
    auto entities = std::make_shared<EntityIndex>(build_entity_index(flows));
    out.entities = entities;
    const SignalFrame frame = build_signal_frame(flows, entities, config.param, delta, t0, span);
    out.graph = pearson_graph(frame);
    out.partition = partition_to_size(out.graph, config.max_group_size);
    return out;
}

namespace {

// Lowest-variance measurement per entity for one window, grouped and
// re-indexed into per-group batches.
std::vector<std::optional<MeasurementBatch>> window_batches(
    std::span<const MeasurementRow> rows, std::size_t begin, std::size_t end,
    const EntityIndex& entities, const std::vector<std::vector<std::size_t>>& groups,
    const std::vector<int>& group_of, const std::vector<std::size_t>& local_index,
    double window_end) {
    std::vector<std::optional<MeasurementBatch>> batches(groups.size());
    if (begin >= end) return batches;

    std::vector<std::pair<std::size_t, const MeasurementRow*>> chosen;  // entity -> row
    for (std::size_t k = begin; k < end; ++k) {
        const MeasurementRow& row = rows[k];
        const std::size_t entity = entities.find(row.entity);
        if (entity == EntityIndex::npos) {
            warn("measurement for unknown entity '" + row.entity + "' ignored");
            continue;
        }
        bool replaced = false;
        for (auto& [seen, best] : chosen) {
            if (seen == entity) {
                if (row.variance < best->variance) best = &row;
                replaced = true;
                break;
            }
        }
        if (!replaced) chosen.emplace_back(entity, &row);
    }

    for (const auto& [entity, row] : chosen) {
        const int g = group_of[entity];
        if (!batches[static_cast<std::size_t>(g)]) {
            batches[static_cast<std::size_t>(g)] = MeasurementBatch{};
            batches[static_cast<std::size_t>(g)]->time = window_end;
        }
        batches[static_cast<std::size_t>(g)]->items.push_back(
            Measurement{local_index[entity], row->value, row->variance});
    }
    return batches;
}

} // namespace

StreamResult run_stream(std::vector<FlowRecord> flows, std::span<const MeasurementRow> measurements,
                        const RunConfig& config, std::shared_ptr<const EntityIndex> entities,
                        const Partition& partition) {
    validate(config);
    if (flows.empty()) throw std::runtime_error("run_stream: no flows");
    if (!entities || entities->size() == 0) throw std::invalid_argument("run_stream: empty entity index");
    if (partition.assignment.size() != entities->size())
        throw std::invalid_argument("run_stream: partition does not match entity index");

    const auto wall_start = Clock::now();

    std::stable_sort(flows.begin(), flows.end(),
                     [](const FlowRecord& a, const FlowRecord& b) { return a.timestamp < b.timestamp; });

    std::vector<MeasurementRow> meas(measurements.begin(), measurements.end());
    std::stable_sort(meas.begin(), meas.end(),
                     [](const MeasurementRow& a, const MeasurementRow& b) { return a.time < b.time; });

    const double t0 = flows.front().timestamp;
    const double t_last = flows.back().timestamp;
    const double tau = config.graph_window;
    const std::size_t window_count =
        static_cast<std::size_t>(std::floor((t_last - t0) / tau)) + 1;

    const std::size_t n = entities->size();
    const std::vector<std::vector<std::size_t>> groups = partition.groups();
    const std::size_t group_count = groups.size();

    std::vector<int> group_of(n, 0);
    std::vector<std::size_t> local_index(n, 0);
    for (std::size_t g = 0; g < group_count; ++g)
        for (std::size_t k = 0; k < groups[g].size(); ++k) {
            group_of[groups[g][k]] = static_cast<int>(g);
            local_index[groups[g][k]] = k;
        }

    std::vector<RiskState> states(group_count);
    std::vector<NoiseModel> noises(group_count);
    std::vector<Matrix> smoothed(group_count);
    for (std::size_t g = 0; g < group_count; ++g) {
        states[g] = init_state(groups[g].size(), config.prior_mean, config.prior_var);
        states[g].time = t0;
        noises[g] = NoiseModel::uniform(groups[g].size(), config.process_noise);
    }

    StreamResult result;
    result.entities = entities;
    result.partition = partition;
    result.start_time = t0;
    result.data_span = static_cast<double>(window_count) * tau;
    result.snapshots.reserve(window_count);

    // Flagged measurements outside the streamed span.
    std::size_t meas_cursor = 0;
    for (const MeasurementRow& row : meas)
        if (row.time < t0) {
            warn("measurement at t=" + std::to_string(row.time) + " precedes the stream; ignored");
            ++meas_cursor;
        } else {
            break;
        }

    std::size_t flow_begin = 0;
    // Groups are the parallel dimension; inner kernels go wide only when
    // there is nothing to parallelize across.
    const kernels::Exec inner_mode =
        group_count == 1 ? kernels::default_exec() : kernels::Exec::Serial;

    for (std::size_t w = 0; w < window_count; ++w) {
        const double window_start = t0 + static_cast<double>(w) * tau;
        const double window_end = window_start + tau;

        std::size_t flow_end = flow_begin;
        while (flow_end < flows.size() && flows[flow_end].timestamp < window_end) ++flow_end;

        std::size_t meas_end = meas_cursor;
        while (meas_end < meas.size() && meas[meas_end].time < window_end) ++meas_end;

        const auto frame_start = Clock::now();
        const SignalFrame frame = build_signal_frame(
            std::span<const FlowRecord>(flows.data() + flow_begin, flow_end - flow_begin),
            entities, config.param, config.sync_window, window_start, tau);
        result.timings.frame_seconds += seconds_since(frame_start);

        const std::vector<std::optional<MeasurementBatch>> batches =
            window_batches(meas, meas_cursor, meas_end, *entities, groups, group_of, local_index,
                           window_end);

        WindowSnapshot snap;
        snap.window = w;
        snap.time = window_end;
        snap.mean.assign(n, 0.0);
        snap.variance.assign(n, 0.0);
        Matrix cov_dump;
        if (config.dump_covariance) cov_dump = Matrix(n, n, 0.0);

        double graph_acc = 0.0;
        double estimator_acc = 0.0;

#pragma omp parallel for schedule(dynamic, 1) reduction(+ : graph_acc, estimator_acc)
        for (std::int64_t gi = 0; gi < static_cast<std::int64_t>(group_count); ++gi) {
            const std::size_t g = static_cast<std::size_t>(gi);
            const std::vector<std::size_t>& members = groups[g];
            const std::size_t k = members.size();

            const auto graph_start = Clock::now();
            Matrix sub(k, frame.samples);
            for (std::size_t a = 0; a < k; ++a) {
                const double* src_row = frame.values.row(members[a]);
                double* dst_row = sub.row(a);
                for (std::size_t c = 0; c < frame.samples; ++c) dst_row[c] = src_row[c];
            }
            const Matrix current = kernels::corr_abs_matrix(sub, inner_mode);
            smoothed[g] = smoothed[g].empty()
                              ? current
                              : smooth_weights(smoothed[g], current, config.forget_factor);

            double relief = config.relief_factor;
            if (config.relief_auto) {
                const double lambda = max_eigenvalue(smoothed[g], 1e-9);
                relief = config.relief_scale * relief_rule_of_thumb(std::max(lambda, 1.0));
            }
            graph_acc += seconds_since(graph_start);

            const auto estimator_start = Clock::now();
            states[g] = step(states[g], smoothed[g], tau, batches[g], noises[g], relief,
                             inner_mode);
            estimator_acc += seconds_since(estimator_start);

            for (std::size_t a = 0; a < k; ++a) {
                snap.mean[members[a]] = states[g].mean[a];
                snap.variance[members[a]] = states[g].cov(a, a);
            }
            if (config.dump_covariance) {
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b)
                        cov_dump(members[a], members[b]) = states[g].cov(a, b);
            }
        }

        result.timings.graph_seconds += graph_acc;
        result.timings.estimator_seconds += estimator_acc;
        result.snapshots.push_back(std::move(snap));
        if (config.dump_covariance) result.covariances.push_back(std::move(cov_dump));

        flow_begin = flow_end;
        meas_cursor = meas_end;
    }

    if (meas_cursor < meas.size())
        warn(std::to_string(meas.size() - meas_cursor) +
             " measurement(s) beyond the last window were ignored");

    result.timings.windows = window_count;
    result.timings.total_seconds = seconds_since(wall_start);
    return result;
}

ThroughputReport throughput_report(const StreamResult& result) {
    ThroughputReport report;
    report.data_seconds = result.data_span;
    report.wall_seconds = result.timings.total_seconds;
    report.stages = result.timings;
    if (report.data_seconds > 0.0 && report.wall_seconds > 0.0) {
        report.coverage_ratio = report.data_seconds / report.wall_seconds;
        report.ratio_defined = true;
    }
    return report;
}

void write_stream_outputs(const StreamResult& result, const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    const fs::path out(config.out_dir);

    {
        std::ofstream risks(out / "risks.csv");
        if (!risks) throw std::runtime_error("cannot create risks.csv");
        risks << std::setprecision(17);
        risks << "time,entity,mean,variance\n";
        for (const WindowSnapshot& snap : result.snapshots)
            append_risk_rows(risks, snap.time, *result.entities, snap.mean, snap.variance);
    }

    write_key_value((out / "risks.meta").string(),
                    {{"t", std::to_string(result.start_time)},
                     {"tau", std::to_string(config.graph_window)},
                     {"delta", std::to_string(config.sync_window)},
                     {"param", param_name(config.param)},
                     {"rho_f", std::to_string(config.forget_factor)},
                     {"relief",
                      config.relief_auto ? std::string("auto") : std::to_string(config.relief_factor)},
                     {"windows", std::to_string(result.snapshots.size())}});

    write_partition_csv((out / "partition.csv").string(), *result.entities, result.partition);

    {
        const ThroughputReport report = throughput_report(result);
        std::ofstream timing(out / "timing.csv");
        if (!timing) throw std::runtime_error("cannot create timing.csv");
        timing << std::setprecision(17);
        timing << "stage,seconds\n";
        timing << "frame," << report.stages.frame_seconds << "\n";
        timing << "graph," << report.stages.graph_seconds << "\n";
        timing << "estimator," << report.stages.estimator_seconds << "\n";
        timing << "total_wall," << report.stages.total_seconds << "\n";
        timing << "windows," << report.stages.windows << "\n";
        timing << "data_seconds," << report.data_seconds << "\n";
        timing << "coverage_ratio," << (report.ratio_defined ? report.coverage_ratio : -1.0)
               << "\n";
    }

    if (config.dump_covariance) {
        for (std::size_t w = 0; w < result.covariances.size(); ++w) {
            std::ostringstream name;
            name << "cov_w" << std::setw(4) << std::setfill('0') << w << ".csv";
            std::ofstream cov(out / name.str());
            if (!cov) throw std::runtime_error("cannot create covariance dump");
            cov << std::setprecision(17);
            const Matrix& p = result.covariances[w];
            for (std::size_t i = 0; i < p.rows(); ++i) {
                for (std::size_t j = 0; j < p.cols(); ++j)
                    cov << (j ? "," : "") << p(i, j);
                cov << "\n";
            }
        }
    }
}

} // namespace nre
