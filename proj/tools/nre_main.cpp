// nre: streaming risk estimation over flow records.
//
// Subcommands: graph, partition, estimate, route, bench, report. Each
// accepts --config <file>; flags override config values. Outputs are CSV
// files plus key/value metadata sidecars under --out. Exit code 0 on
// success; failures print one machine-readable "error: ..." line.

#include "nre/bench.hpp"
#include "nre/connectivity.hpp"
#include "nre/io.hpp"
#include "nre/log.hpp"
#include "nre/pipeline.hpp"
#include "nre/routing.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using namespace nre;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string flows;
    std::string out_dir;
    std::string param;
    double sync_window = -1.0;
    double graph_window = -1.0;
    double forget = -1.0;
    std::string relief;
    long max_size = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "key = value config file");
    cmd->add_option("--flows", flags.flows, "flow CSV file");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--param", flags.param, "connection parameter name");
    cmd->add_option("--sync-window", flags.sync_window, "sync window delta, seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--graph-window", flags.graph_window, "graph window tau, seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--forget", flags.forget, "forget factor rho_f")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--relief", flags.relief, "relief factor rho_r or 'auto'");
    cmd->add_option("--max-size", flags.max_size, "largest entity group after partitioning")
        ->check(CLI::PositiveNumber);
}

RunConfig resolve_config(const CommonFlags& flags) {
    RunConfig config = flags.config_path.empty() ? RunConfig{} : load_config(flags.config_path);
    if (!flags.flows.empty()) config.flows_path = flags.flows;
    if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
    if (!flags.param.empty()) {
        const std::optional<ConnParam> p = parse_param(flags.param);
        if (!p) throw std::invalid_argument("unknown connection parameter '" + flags.param + "'");
        config.param = *p;
    }
    if (flags.sync_window > 0.0) config.sync_window = flags.sync_window;
    if (flags.graph_window > 0.0) config.graph_window = flags.graph_window;
    if (flags.forget >= 0.0) config.forget_factor = flags.forget;
    if (!flags.relief.empty()) {
        if (flags.relief == "auto") {
            config.relief_auto = true;
        } else {
            config.relief_auto = false;
            config.relief_factor = std::stod(flags.relief);
        }
    }
    if (flags.max_size > 0) config.max_group_size = static_cast<std::size_t>(flags.max_size);
    validate(config);
    return config;
}

void write_graph_outputs(const ConnectivityGraph& graph, const EntityIndex& entities,
                         const RunConfig& config, const fs::path& out, const std::string& stem) {
    write_graph_csv((out / (stem + ".csv")).string(), graph, entities);
    write_key_value((out / (stem + ".meta")).string(),
                    {{"t", std::to_string(graph.window_start)},
                     {"tau", std::to_string(graph.graph_window)},
                     {"delta", std::to_string(config.sync_window)},
                     {"param", param_name(config.param)},
                     {"rho_f", std::to_string(config.forget_factor)}});
}

int cmd_graph(const CommonFlags& flags, bool per_window) {
    const RunConfig config = resolve_config(flags);
    const std::vector<FlowRecord> flows = load_flows(config);
    fs::create_directories(config.out_dir);
    const fs::path out(config.out_dir);

    if (!per_window) {
        const OfflineResult offline = offline_partition(flows, config);
        write_graph_outputs(offline.graph, *offline.entities, config, out, "graph");
        std::cout << "wrote " << (out / "graph.csv").string() << " (" << offline.entities->size()
                  << " entities)\n";
        return 0;
    }

    auto entities = std::make_shared<EntityIndex>(build_entity_index(flows));
    double t0 = std::numeric_limits<double>::infinity();
    double t_last = -std::numeric_limits<double>::infinity();
    for (const FlowRecord& f : flows) {
        t0 = std::min(t0, f.timestamp);
        t_last = std::max(t_last, f.timestamp);
    }
    const std::size_t windows =
        static_cast<std::size_t>(std::floor((t_last - t0) / config.graph_window)) + 1;
    Matrix smoothed;
    for (std::size_t w = 0; w < windows; ++w) {
        const double start = t0 + static_cast<double>(w) * config.graph_window;
        const SignalFrame frame = build_signal_frame(
            flows, entities, config.param, config.sync_window, start, config.graph_window);
        const ConnectivityGraph current = pearson_graph(frame);
        smoothed = smoothed.empty()
                       ? current.weights
                       : smooth_weights(smoothed, current.weights, config.forget_factor);
        ConnectivityGraph graph = current;
        graph.weights = smoothed;
        std::ostringstream stem;
        stem << "graph_w" << std::setw(4) << std::setfill('0') << w;
        write_graph_outputs(graph, *entities, config, out, stem.str());
    }
    std::cout << "wrote " << windows << " per-window graphs under " << out.string() << "\n";
    return 0;
}

int cmd_partition(const CommonFlags& flags) {
    const RunConfig config = resolve_config(flags);
    const std::vector<FlowRecord> flows = load_flows(config);
    fs::create_directories(config.out_dir);
    const fs::path out(config.out_dir);

    const OfflineResult offline = offline_partition(flows, config);
    write_partition_csv((out / "partition.csv").string(), *offline.entities, offline.partition);
    write_graph_outputs(offline.graph, *offline.entities, config, out, "graph");

    const double cut = cut_weight(offline.graph, offline.partition);
    std::cout << "entities: " << offline.entities->size()
              << "\ngroups: " << offline.partition.group_count << "\ncut_weight: " << cut
              << "\nwrote " << (out / "partition.csv").string() << "\n";
    return 0;
}

int cmd_estimate(const CommonFlags& flags, const std::string& measurements_flag,
                 const std::string& partition_flag, bool dump_cov) {
    RunConfig config = resolve_config(flags);
    if (!measurements_flag.empty()) config.measurements_path = measurements_flag;
    if (!partition_flag.empty()) config.partition_path = partition_flag;
    if (dump_cov) config.dump_covariance = true;

    const std::vector<FlowRecord> flows = load_flows(config);

    std::shared_ptr<const EntityIndex> entities;
    Partition partition;
    if (!config.partition_path.empty()) {
        auto [loaded_entities, loaded_partition] = read_partition_csv(config.partition_path);
        entities = std::make_shared<EntityIndex>(std::move(loaded_entities));
        partition = std::move(loaded_partition);
    } else {
        OfflineResult offline = offline_partition(flows, config);
        entities = offline.entities;
        partition = std::move(offline.partition);
    }

    std::vector<MeasurementRow> measurements;
    if (!config.measurements_path.empty())
        measurements = read_measurements_csv(config.measurements_path);

    const StreamResult result = run_stream(flows, measurements, config, entities, partition);
    write_stream_outputs(result, config);

    const ThroughputReport report = throughput_report(result);
    std::cout << "windows: " << result.snapshots.size() << "\nentities: " << entities->size()
              << "\ngroups: " << partition.group_count << "\ncoverage: ";
    if (report.ratio_defined)
        std::cout << report.coverage_ratio << " data seconds per wall second\n";
    else
        std::cout << "undefined\n";
    std::cout << "wrote " << (fs::path(config.out_dir) / "risks.csv").string() << "\n";
    return 0;
}

int cmd_route(const CommonFlags& flags, const std::string& topology_flag,
              const std::string& risks_flag, const std::string& src, const std::string& dst,
              bool all, const std::vector<std::string>& exclude, bool no_endpoints,
              double at_time) {
    RunConfig config = flags.config_path.empty() ? RunConfig{} : load_config(flags.config_path);
    if (!topology_flag.empty()) config.topology_path = topology_flag;
    if (config.topology_path.empty()) throw std::runtime_error("route: --topology is required");
    if (risks_flag.empty()) throw std::runtime_error("route: --risks is required");

    // Risk vector: rows at the requested time (default: the last snapshot).
    const std::vector<RiskRow> rows = read_risk_csv(risks_flag);
    if (rows.empty()) throw std::runtime_error("route: risk file has no rows");
    double pick = rows.front().time;
    for (const RiskRow& row : rows)
        if (at_time >= 0.0 ? std::abs(row.time - at_time) < std::abs(pick - at_time)
                           : row.time > pick)
            pick = row.time;

    EntityIndex entities;
    Vector risks;
    for (const RiskRow& row : rows) {
        if (row.time != pick) continue;
        const std::size_t i = entities.add(row.entity);
        if (i == risks.size())
            risks.push_back(row.mean);
        else
            risks[i] = row.mean;
    }

    Topology topo = read_topology_csv(config.topology_path, entities);
    std::vector<std::size_t> excluded;
    for (const std::string& id : exclude) {
        const std::size_t i = entities.find(id);
        if (i == EntityIndex::npos)
            warn("route: excluded entity '" + id + "' not present");
        else
            excluded.push_back(i);
    }
    if (!excluded.empty()) topo = topo.without(excluded);

    const std::size_t src_index = entities.find(src);
    if (src_index == EntityIndex::npos)
        throw std::runtime_error("route: unknown src entity '" + src + "'");
    const bool include_endpoints = !no_endpoints;

    auto print_route = [&](const RouteResult& r, const std::string& dst_id) {
        if (!r.reachable) {
            std::cout << dst_id << ",unreachable,\n";
            return;
        }
        std::cout << dst_id << "," << r.path_risk << ",";
        for (std::size_t k = 0; k < r.path.size(); ++k)
            std::cout << (k ? " " : "") << entities.id_of(r.path[k]);
        std::cout << "\n";
    };

    std::cout << "destination,path_risk,path\n";
    if (all) {
        std::vector<std::size_t> order(entities.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        const std::vector<RouteResult> routes =
            all_min_max_paths(topo, risks, src_index, include_endpoints);
        // Fig-7-style table: destinations sorted by path risk, unreachable last.
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (routes[a].reachable != routes[b].reachable) return routes[a].reachable;
            if (routes[a].path_risk != routes[b].path_risk)
                return routes[a].path_risk < routes[b].path_risk;
            return a < b;
        });
        for (std::size_t dst_index : order) {
            if (dst_index == src_index) continue;
            print_route(routes[dst_index], entities.id_of(dst_index));
        }
    } else {
        if (dst.empty()) throw std::runtime_error("route: provide --dst or --all");
        const std::size_t dst_index = entities.find(dst);
        if (dst_index == EntityIndex::npos)
            throw std::runtime_error("route: unknown dst entity '" + dst + "'");
        print_route(min_max_path(topo, risks, src_index, dst_index, include_endpoints), dst);
    }
    return 0;
}

void write_roc_csv(const fs::path& path, const RocCurve& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create " + path.string());
    out << std::setprecision(17);
    out << "threshold,fpr,tpr\n";
    for (const RocPoint& p : curve.points)
        out << p.threshold << "," << p.fpr << "," << p.tpr << "\n";
}

int cmd_bench(const CommonFlags& flags, bool sweep, double tau_override) {
    RunConfig config = resolve_config(flags);
    if (tau_override > 0.0) config.graph_window = tau_override;
    validate(config);

    const std::vector<FlowRecord> flows = load_flows(config);
    fs::create_directories(config.out_dir);
    const fs::path out(config.out_dir);

    std::vector<ConnParam> params;
    if (sweep) {
        for (ConnParam p : all_params())
            if (p != ConnParam::Activation) params.push_back(p);
    } else {
        params.push_back(config.param);
    }

    std::ofstream summary(out / "bench_summary.csv");
    if (!summary) throw std::runtime_error("cannot create bench_summary.csv");
    summary << std::setprecision(10);
    summary << "param,windows,attack_windows,nre_auc_val,nre_auc_test,nre_peak_ba_test,"
               "fbnsi_auc_val,fbnsi_auc_test,fbnsi_peak_ba_test\n";

    std::cout << std::left << std::setw(28) << "param" << std::right << std::setw(10)
              << "NRE AUC" << std::setw(12) << "FBNSI AUC" << std::setw(10) << "NRE BA"
              << std::setw(12) << "FBNSI BA" << "\n";

    for (ConnParam p : params) {
        const BenchComparison cmp = bench_compare(flows, config, p);
        std::string stem(param_name(p));
        std::replace(stem.begin(), stem.end(), ' ', '_');
        write_roc_csv(out / ("roc_nre_" + stem + ".csv"), cmp.nre.test_roc);
        write_roc_csv(out / ("roc_fbnsi_" + stem + ".csv"), cmp.fbnsi.test_roc);

        summary << param_name(p) << "," << cmp.windows << "," << cmp.attack_windows << ","
                << cmp.nre.val_auc << "," << cmp.nre.test_auc << "," << cmp.nre.test_peak_ba
                << "," << cmp.fbnsi.val_auc << "," << cmp.fbnsi.test_auc << ","
                << cmp.fbnsi.test_peak_ba << "\n";

        std::cout << std::left << std::setw(28) << param_name(p) << std::right << std::fixed
                  << std::setprecision(3) << std::setw(10) << cmp.nre.test_auc << std::setw(12)
                  << cmp.fbnsi.test_auc << std::setw(10) << cmp.nre.test_peak_ba << std::setw(12)
                  << cmp.fbnsi.test_peak_ba << "\n";
        std::cout.unsetf(std::ios::fixed);
    }
    std::cout << "wrote " << (out / "bench_summary.csv").string() << "\n";
    return 0;
}

int cmd_report(const std::string& out_dir) {
    const fs::path timing = fs::path(out_dir) / "timing.csv";
    std::ifstream in(timing);
    if (!in)
        throw std::runtime_error("report: no timing.csv under '" + out_dir +
                                 "' (run estimate first)");
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, double> stages;
    while (std::getline(in, line)) {
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) continue;
        stages[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    }
    std::cout << "windows:             " << static_cast<std::size_t>(stages["windows"]) << "\n"
              << "data seconds:        " << stages["data_seconds"] << "\n"
              << "wall seconds:        " << stages["total_wall"] << "\n"
              << "frame stage (s):     " << stages["frame"] << "\n"
              << "graph stage (s):     " << stages["graph"] << "\n";
    if (stages["windows"] > 0.0)
        std::cout << "graph per window (s):" << stages["graph"] / stages["windows"] << "\n";
    std::cout << "estimator stage (s): " << stages["estimator"] << "\n";
    const double ratio = stages["coverage_ratio"];
    if (ratio < 0.0)
        std::cout << "coverage ratio:      undefined\n";
    else
        std::cout << "coverage ratio:      " << ratio << " data seconds per wall second\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming network risk estimation over flow records"};
    app.require_subcommand(1);

    CommonFlags graph_flags;
    bool per_window = false;
    CLI::App* graph_cmd = app.add_subcommand("graph", "compute connectivity graphs from flows");
    add_common(graph_cmd, graph_flags);
    graph_cmd->add_flag("--per-window", per_window, "emit one smoothed graph per window");

    CommonFlags partition_flags;
    CLI::App* partition_cmd =
        app.add_subcommand("partition", "discover entity groups on historical flows");
    add_common(partition_cmd, partition_flags);

    CommonFlags estimate_flags;
    std::string measurements_flag, partition_file_flag;
    bool dump_cov = false;
    CLI::App* estimate_cmd =
        app.add_subcommand("estimate", "stream flows into per-window risk snapshots");
    add_common(estimate_cmd, estimate_flags);
    estimate_cmd->add_option("--measurements", measurements_flag,
                             "risk measurement CSV (time,entity,value,variance)");
    estimate_cmd->add_option("--partition", partition_file_flag,
                             "partition CSV from a previous run");
    estimate_cmd->add_flag("--dump-cov", dump_cov, "write per-window covariance matrices");

    CommonFlags route_flags;
    std::string topology_flag, risks_flag, src, dst;
    bool all = false, no_endpoints = false;
    double at_time = -1.0;
    std::vector<std::string> exclude;
    CLI::App* route_cmd = app.add_subcommand("route", "min-max risk routing on a topology");
    add_common(route_cmd, route_flags);
    route_cmd->add_option("--topology", topology_flag, "edge list CSV of entity identifiers");
    route_cmd->add_option("--risks", risks_flag, "risks.csv from estimate");
    route_cmd->add_option("--src", src, "source entity identifier")->required();
    route_cmd->add_option("--dst", dst, "destination entity identifier");
    route_cmd->add_flag("--all", all, "route to every other entity");
    route_cmd->add_option("--exclude", exclude, "entity identifiers to drop from the topology");
    route_cmd->add_flag("--no-endpoints", no_endpoints,
                        "exclude src/dst risks from the path maximum");
    route_cmd->add_option("--time", at_time, "snapshot time to route on (default: latest)");

    CommonFlags bench_flags;
    bool sweep = false;
    double tau_override = -1.0;
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "network-state classification: risk features vs FBNSI");
    add_common(bench_cmd, bench_flags);
    bench_cmd->add_flag("--sweep", sweep, "evaluate every connection parameter");
    bench_cmd->add_option("--tau", tau_override, "comparison window size for both methods");

    std::string report_dir = "out";
    CLI::App* report_cmd = app.add_subcommand("report", "print the timing report of a run");
    report_cmd->add_option("--out", report_dir, "output directory of a previous estimate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (graph_cmd->parsed()) return cmd_graph(graph_flags, per_window);
        if (partition_cmd->parsed()) return cmd_partition(partition_flags);
        if (estimate_cmd->parsed())
            return cmd_estimate(estimate_flags, measurements_flag, partition_file_flag, dump_cov);
        if (route_cmd->parsed())
            return cmd_route(route_flags, topology_flag, risks_flag, src, dst, all, exclude,
                             no_endpoints, at_time);
        if (bench_cmd->parsed()) return cmd_bench(bench_flags, sweep, tau_override);
        if (report_cmd->parsed()) return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
