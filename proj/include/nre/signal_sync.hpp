#ifndef NRE_SIGNAL_SYNC_HPP
#define NRE_SIGNAL_SYNC_HPP

#include "nre/flow_ingest.hpp"
#include "nre/matrix.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace nre {

/// Scalar aspect of a flow seen from one endpoint. Each parameter carries
/// the slot aggregation method used during synchronization.
enum class ConnParam {
    Activation,
    ActiveTime,
    FlowDuration,
    FlowSpeed,
    HeaderLength,
    IdleTime,
    NumActivePackets,
    NumPacketsReceived,
    NumPacketsSent,
    PacketDelay,
    PacketLength,
    PortNumber,
    Protocol,
    ResponseTime,
};

enum class Aggregation { Total, Average, Last, Binary };

Aggregation aggregation_of(ConnParam param);
const char* param_name(ConnParam param);
std::vector<ConnParam> all_params();

/// Accepts display names ("Number of Packets Received") or snake_case
/// ("number_of_packets_received"), case-insensitive.
std::optional<ConnParam> parse_param(std::string_view name);

/// Per-flow value of `param` from each endpoint's perspective. Directional
/// parameters mirror forward/backward attributes across the two endpoints
/// (src sends forward packets, receives backward ones); flow-level
/// parameters contribute the same value to both.
std::pair<double, double> endpoint_values(const FlowRecord& flow, ConnParam param);

/// endpoint_values with identifiers attached: [(src, v_src), (dst, v_dst)].
std::vector<std::pair<std::string, double>> entity_contribution(const FlowRecord& flow,
                                                                ConnParam param);

/// Synchronous per-entity samples for one graph window. Row i holds entity
/// i's N = floor(tau/delta) samples; every cell is finite, silent slots
/// are 0.
struct SignalFrame {
    double window_start = 0.0;  // t
    double sync_window = 0.0;   // delta
    double graph_window = 0.0;  // tau
    std::size_t samples = 0;    // N
    Matrix values;              // n x N
    std::shared_ptr<const EntityIndex> entities;
};

/// Aggregates the flows whose timestamp falls in [window_start,
/// window_start + graph_window) into slots of length sync_window. Flows
/// outside the window and endpoints missing from `entities` are ignored.
/// Throws std::invalid_argument when sync_window <= 0 or
/// graph_window < sync_window.
SignalFrame build_signal_frame(std::span<const FlowRecord> flows,
                               std::shared_ptr<const EntityIndex> entities, ConnParam param,
                               double sync_window, double window_start, double graph_window);

} // namespace nre

#endif
