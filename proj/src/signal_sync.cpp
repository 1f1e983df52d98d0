#include "nre/signal_sync.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nre {

Aggregation aggregation_of(ConnParam param) {
    switch (param) {
        case ConnParam::Activation: return Aggregation::Binary;
        case ConnParam::ActiveTime: return Aggregation::Average;
        case ConnParam::FlowDuration: return Aggregation::Total;
        case ConnParam::FlowSpeed: return Aggregation::Average;
        case ConnParam::HeaderLength: return Aggregation::Average;
        case ConnParam::IdleTime: return Aggregation::Average;
        case ConnParam::NumActivePackets: return Aggregation::Total;
        case ConnParam::NumPacketsReceived: return Aggregation::Total;
        case ConnParam::NumPacketsSent: return Aggregation::Total;
        case ConnParam::PacketDelay: return Aggregation::Average;
        case ConnParam::PacketLength: return Aggregation::Average;
        case ConnParam::PortNumber: return Aggregation::Last;
        case ConnParam::Protocol: return Aggregation::Last;
        case ConnParam::ResponseTime: return Aggregation::Average;
    }
    throw std::invalid_argument("unknown connection parameter");
}

const char* param_name(ConnParam param) {
    switch (param) {
        case ConnParam::Activation: return "Activation";
        case ConnParam::ActiveTime: return "Active Time";
        case ConnParam::FlowDuration: return "Flow Duration";
        case ConnParam::FlowSpeed: return "Flow Speed";
        case ConnParam::HeaderLength: return "Header Length";
        case ConnParam::IdleTime: return "Idle Time";
        case ConnParam::NumActivePackets: return "Number of Active Packets";
        case ConnParam::NumPacketsReceived: return "Number of Packets Received";
        case ConnParam::NumPacketsSent: return "Number of Packets Sent";
        case ConnParam::PacketDelay: return "Packet Delay";
        case ConnParam::PacketLength: return "Packet Length";
        case ConnParam::PortNumber: return "Port Number";
        case ConnParam::Protocol: return "Protocol";
        case ConnParam::ResponseTime: return "Response Time";
    }
    return "?";
}

std::vector<ConnParam> all_params() {
    return {ConnParam::Activation,     ConnParam::ActiveTime,
            ConnParam::FlowDuration,   ConnParam::FlowSpeed,
            ConnParam::HeaderLength,   ConnParam::IdleTime,
            ConnParam::NumActivePackets, ConnParam::NumPacketsReceived,
            ConnParam::NumPacketsSent, ConnParam::PacketDelay,
            ConnParam::PacketLength,   ConnParam::PortNumber,
            ConnParam::Protocol,       ConnParam::ResponseTime};
}

std::optional<ConnParam> parse_param(std::string_view name) {
    std::string key;
    for (char c : name) {
        if (c == '_' || c == ' ' || c == '-') continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    for (ConnParam p : all_params()) {
        std::string candidate;
        for (const char* c = param_name(p); *c; ++c) {
            if (*c == ' ') continue;
            candidate.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(*c))));
        }
        if (candidate == key) return p;
    }
    return std::nullopt;
}

std::pair<double, double> endpoint_values(const FlowRecord& flow, ConnParam param) {
    switch (param) {
        case ConnParam::Activation: return {1.0, 1.0};
        case ConnParam::ActiveTime: return {flow.active_mean, flow.active_mean};
        case ConnParam::FlowDuration: return {flow.duration, flow.duration};
        case ConnParam::FlowSpeed: return {flow.bytes_per_second, flow.bytes_per_second};
        case ConnParam::HeaderLength: return {flow.fwd_header_bytes, flow.fwd_header_bytes};
        case ConnParam::IdleTime: return {flow.idle_mean, flow.idle_mean};
        case ConnParam::NumActivePackets:
            return {flow.fwd_payload_packets, flow.fwd_payload_packets};
        case ConnParam::NumPacketsReceived: return {flow.bwd_packets, flow.fwd_packets};
        case ConnParam::NumPacketsSent: return {flow.fwd_packets, flow.bwd_packets};
        case ConnParam::PacketDelay: return {flow.fwd_iat_mean, flow.bwd_iat_mean};
        case ConnParam::PacketLength:
            return {flow.fwd_packet_length_mean, flow.fwd_packet_length_mean};
        case ConnParam::PortNumber: return {flow.src_port, flow.src_port};
        case ConnParam::Protocol: return {flow.protocol, flow.protocol};
        case ConnParam::ResponseTime: return {flow.bwd_iat_mean, flow.fwd_iat_mean};
    }
    throw std::invalid_argument("unknown connection parameter");
}

std::vector<std::pair<std::string, double>> entity_contribution(const FlowRecord& flow,
                                                                ConnParam param) {
    const auto [src_value, dst_value] = endpoint_values(flow, param);
    return {{flow.src_entity, src_value}, {flow.dst_entity, dst_value}};
}

SignalFrame build_signal_frame(std::span<const FlowRecord> flows,
                               std::shared_ptr<const EntityIndex> entities, ConnParam param,
                               double sync_window, double window_start, double graph_window) {
    if (sync_window <= 0.0) throw std::invalid_argument("sync window must be positive");
    if (graph_window < sync_window)
        throw std::invalid_argument("graph window must be at least one sync window");
    if (!entities) throw std::invalid_argument("build_signal_frame: entity index required");

    const std::size_t n = entities->size();
    const std::size_t samples =
        static_cast<std::size_t>(std::floor(graph_window / sync_window));

    SignalFrame frame;
    frame.window_start = window_start;
    frame.sync_window = sync_window;
    frame.graph_window = graph_window;
    frame.samples = samples;
    frame.values = Matrix(n, samples, 0.0);

    const Aggregation agg = aggregation_of(param);

    // Average needs contribution counts; Last keeps the latest timestamp
    // per cell (input order breaks exact ties).
    Matrix counts;
    Matrix last_ts;
    if (agg == Aggregation::Average) counts = Matrix(n, samples, 0.0);
    if (agg == Aggregation::Last)
        last_ts = Matrix(n, samples, -std::numeric_limits<double>::infinity());

    const double window_end = window_start + graph_window;
    for (const FlowRecord& flow : flows) {
        if (flow.timestamp < window_start || flow.timestamp >= window_end) continue;
        std::size_t slot =
            static_cast<std::size_t>(std::floor((flow.timestamp - window_start) / sync_window));
        // The trailing partial slot (when tau is not a multiple of delta)
        // folds into the last full sample.
        if (slot >= samples) slot = samples - 1;

        const auto [src_value, dst_value] = endpoint_values(flow, param);
        const std::size_t endpoints[2] = {entities->find(flow.src_entity),
                                          entities->find(flow.dst_entity)};
        const double values[2] = {src_value, dst_value};
        for (int e = 0; e < 2; ++e) {
            const std::size_t i = endpoints[e];
            if (i == EntityIndex::npos) continue;
            switch (agg) {
                case Aggregation::Total: frame.values(i, slot) += values[e]; break;
                case Aggregation::Binary: frame.values(i, slot) = 1.0; break;
                case Aggregation::Average:
                    frame.values(i, slot) += values[e];
                    counts(i, slot) += 1.0;
                    break;
                case Aggregation::Last:
                    if (flow.timestamp >= last_ts(i, slot)) {
                        last_ts(i, slot) = flow.timestamp;
                        frame.values(i, slot) = values[e];
                    }
                    break;
            }
        }
    }

    if (agg == Aggregation::Average) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < samples; ++k)
                if (counts(i, k) > 0.0) frame.values(i, k) /= counts(i, k);
    }
    frame.entities = std::move(entities);
    return frame;
}

} // namespace nre
