#ifndef NRE_FLOW_RECORD_HPP
#define NRE_FLOW_RECORD_HPP

#include <optional>
#include <string>

namespace nre {

/// One bidirectional flow between two endpoints. "Forward" is the
/// src -> dst direction. Timestamps are seconds; whether they are epoch or
/// run-relative is decided by the caller (the pipeline normalizes to
/// run-relative seconds before windowing).
struct FlowRecord {
    double timestamp = 0.0;
    std::string src_entity;
    std::string dst_entity;
    double duration = 0.0;             // seconds
    double fwd_packets = 0.0;
    double bwd_packets = 0.0;
    double fwd_payload_packets = 0.0;  // forward packets with >= 1 payload byte
    double bytes_per_second = 0.0;
    double fwd_header_bytes = 0.0;
    double active_mean = 0.0;          // seconds
    double idle_mean = 0.0;            // seconds
    double fwd_iat_mean = 0.0;         // seconds
    double bwd_iat_mean = 0.0;         // seconds
    double fwd_packet_length_mean = 0.0;
    double src_port = 0.0;
    double protocol = 0.0;
    std::optional<std::string> label;  // "BENIGN" or an attack name

    bool is_attack() const { return label.has_value() && *label != "BENIGN"; }
};

} // namespace nre

#endif
