#ifndef NRE_PIPELINE_HPP
#define NRE_PIPELINE_HPP

#include "nre/connectivity.hpp"
#include "nre/estimator.hpp"
#include "nre/flow_ingest.hpp"
#include "nre/io.hpp"
#include "nre/partition.hpp"
#include "nre/signal_sync.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nre {

/// Run hyperparameters and file locations. Loaded from a "key = value"
/// config file; command-line flags may override individual fields.
struct RunConfig {
    ConnParam param = ConnParam::NumPacketsReceived;
    double sync_window = 1.2;    // delta, seconds
    double graph_window = 90.0;  // tau, seconds
    double forget_factor = 0.5;  // rho_f in [0, 1]

    bool relief_auto = true;     // relief_factor = "auto"
    double relief_factor = 0.0;  // used when relief_auto is false
    double relief_scale = 1.0;   // multiplier on the rule of thumb when auto;
                                 // set below 1 to relieve slightly less and
                                 // let unobserved risks grow between updates

    double process_noise = 1e-3;  // q, diagonal of Q
    double prior_mean = 1.0;      // c
    double prior_var = 1e-3;      // defaults to process_noise

    std::size_t max_group_size = 32;
    double offline_sync_window = 0.0;  // 0 = use sync_window

    char delimiter = ',';
    Schema schema = default_schema();

    std::string flows_path;
    std::string measurements_path;
    std::string topology_path;
    std::string partition_path;
    std::string out_dir = "out";
    bool dump_covariance = false;

    double train_fraction = 0.5;  // bench chronological split
    double val_fraction = 0.25;
};

/// Builds a RunConfig from parsed key/value pairs; unknown keys warn.
RunConfig config_from_map(const std::map<std::string, std::string>& kv);
RunConfig load_config(const std::string& path);

/// Checks the RunConfig invariants, throwing std::invalid_argument.
void validate(const RunConfig& config);

/// Parses, reports skipped rows as warnings and rebases timestamps so the
/// earliest record is at 0. Throws when no valid record remains.
std::vector<FlowRecord> load_flows(const RunConfig& config);

/// Offline stage: one connectivity graph over the whole historical span
/// (same sync window as streaming unless offline_sync_window is set),
/// recursively partitioned to max_group_size.
struct OfflineResult {
    std::shared_ptr<const EntityIndex> entities;
    Partition partition;
    ConnectivityGraph graph;
};
OfflineResult offline_partition(std::span<const FlowRecord> flows, const RunConfig& config);

/// One streamed window: post-step mean risk and variance per entity in
/// global index order; time is the window end (the state time).
struct WindowSnapshot {
    std::size_t window = 0;
    double time = 0.0;
    Vector mean;
    Vector variance;
};

/// Accumulated worker-seconds per stage plus total wall time.
struct StageTimings {
    double frame_seconds = 0.0;
    double graph_seconds = 0.0;     // correlation + smoothing + eigenvalue
    double estimator_seconds = 0.0;
    double total_seconds = 0.0;
    std::size_t windows = 0;
};

struct StreamResult {
    std::shared_ptr<const EntityIndex> entities;
    Partition partition;
    std::vector<WindowSnapshot> snapshots;
    std::vector<Matrix> covariances;  // per window, block-diagonal by group; only when requested
    StageTimings timings;
    double start_time = 0.0;
    double data_span = 0.0;  // seconds of data the windows cover
};

/// Streaming stage per the real-time flowchart: per consecutive window and
/// per entity group, build the frame, compute and smooth the group's
/// connectivity, then advance the group's risk state with any in-window
/// measurements. Groups evolve independently and in parallel; snapshots
/// are bit-identical to a serial run.
StreamResult run_stream(std::vector<FlowRecord> flows, std::span<const MeasurementRow> measurements,
                        const RunConfig& config, std::shared_ptr<const EntityIndex> entities,
                        const Partition& partition);

struct ThroughputReport {
    double data_seconds = 0.0;
    double wall_seconds = 0.0;
    double coverage_ratio = 0.0;  // data seconds per wall second
    bool ratio_defined = false;
    StageTimings stages;
};
ThroughputReport throughput_report(const StreamResult& result);

/// Writes risks.csv, risks.meta, partition.csv, timing.csv and optional
/// covariance dumps under config.out_dir.
void write_stream_outputs(const StreamResult& result, const RunConfig& config);

} // namespace nre

#endif
