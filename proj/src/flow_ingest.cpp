#include "nre/flow_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nre {

std::size_t EntityIndex::add(const std::string& id) {
    auto it = lookup_.find(id);
    if (it != lookup_.end()) return it->second;
    const std::size_t index = ids_.size();
    ids_.push_back(id);
    lookup_.emplace(id, index);
    return index;
}

std::size_t EntityIndex::find(const std::string& id) const {
    auto it = lookup_.find(id);
    return it == lookup_.end() ? npos : it->second;
}

Schema default_schema() {
    Schema s;
    for (const char* field :
         {"timestamp", "src_entity", "dst_entity", "duration", "fwd_packets", "bwd_packets",
          "fwd_payload_packets", "bytes_per_second", "fwd_header_bytes", "active_mean",
          "idle_mean", "fwd_iat_mean", "bwd_iat_mean", "fwd_packet_length_mean", "src_port",
          "protocol", "label"})
        s[field] = field;
    return s;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_row(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delimiter, start);
        if (pos == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) return false;
    return std::isfinite(out);
}

// CICFlowMeter-style timestamps: "m/d/Y H:M" or "m/d/Y H:M:S", taken as UTC.
bool parse_datetime(const std::string& s, double& out) {
    for (const char* fmt : {"%m/%d/%Y %H:%M:%S", "%m/%d/%Y %H:%M", "%Y-%m-%d %H:%M:%S"}) {
        std::tm tm = {};
        std::istringstream ss(s);
        ss >> std::get_time(&tm, fmt);
        if (!ss.fail()) {
            out = static_cast<double>(timegm(&tm));
            return true;
        }
    }
    return false;
}

struct ColumnMap {
    // canonical field -> column position; npos when absent
    std::map<std::string, std::size_t> pos;
    bool has(const std::string& field) const { return pos.count(field) > 0; }
    std::size_t at(const std::string& field) const { return pos.at(field); }
};

constexpr std::size_t kMaxStoredErrors = 20;

void report_row_error(ParseResult& result, std::size_t row, const std::string& what) {
    ++result.rows_skipped;
    if (result.errors.size() < kMaxStoredErrors)
        result.errors.push_back("row " + std::to_string(row) + ": " + what);
}

} // namespace

ParseResult parse_flows(std::istream& source, const Schema& schema, char delimiter) {
    std::string line;
    if (!std::getline(source, line)) throw std::runtime_error("flow input is empty (no header row)");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> headers = split_row(line, delimiter);
    std::unordered_map<std::string, std::size_t> header_pos;
    for (std::size_t i = 0; i < headers.size(); ++i) header_pos.emplace(headers[i], i);

    ColumnMap columns;
    for (const auto& [field, column_name] : schema) {
        auto it = header_pos.find(column_name);
        if (it != header_pos.end()) columns.pos[field] = it->second;
    }
    for (const auto& [field, column_name] : schema) {
        if (field == "label") continue;  // optional
        if (!columns.has(field))
            throw std::runtime_error("missing mandatory column '" + column_name + "' for field '" +
                                     field + "'");
    }

    struct NumField {
        const char* name;
        double FlowRecord::* member;
        bool nonnegative;
    };
    static const NumField numeric_fields[] = {
        {"duration", &FlowRecord::duration, true},
        {"fwd_packets", &FlowRecord::fwd_packets, true},
        {"bwd_packets", &FlowRecord::bwd_packets, true},
        {"fwd_payload_packets", &FlowRecord::fwd_payload_packets, true},
        {"bytes_per_second", &FlowRecord::bytes_per_second, true},
        {"fwd_header_bytes", &FlowRecord::fwd_header_bytes, true},
        {"active_mean", &FlowRecord::active_mean, true},
        {"idle_mean", &FlowRecord::idle_mean, true},
        {"fwd_iat_mean", &FlowRecord::fwd_iat_mean, true},
        {"bwd_iat_mean", &FlowRecord::bwd_iat_mean, true},
        {"fwd_packet_length_mean", &FlowRecord::fwd_packet_length_mean, true},
        {"src_port", &FlowRecord::src_port, false},
        {"protocol", &FlowRecord::protocol, false},
    };

    ParseResult result;
    std::size_t row = 0;
    while (std::getline(source, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        ++result.rows_total;

        const std::vector<std::string> cells = split_row(line, delimiter);
        std::size_t needed = 0;
        for (const auto& [field, p] : columns.pos) needed = std::max(needed, p + 1);
        if (cells.size() < needed) {
            report_row_error(result, row, "too few columns");
            continue;
        }

        FlowRecord rec;
        rec.src_entity = cells[columns.at("src_entity")];
        rec.dst_entity = cells[columns.at("dst_entity")];
        if (rec.src_entity.empty() || rec.dst_entity.empty()) {
            report_row_error(result, row, "empty endpoint identifier");
            continue;
        }

        const std::string& ts = cells[columns.at("timestamp")];
        if (!parse_double(ts, rec.timestamp) && !parse_datetime(ts, rec.timestamp)) {
            report_row_error(result, row, "bad timestamp '" + ts + "'");
            continue;
        }

        bool ok = true;
        for (const NumField& f : numeric_fields) {
            const std::string& cell = cells[columns.at(f.name)];
            double value = 0.0;
            if (!parse_double(cell, value)) {
                report_row_error(result, row,
                                 std::string("non-numeric ") + f.name + " '" + cell + "'");
                ok = false;
                break;
            }
            if (f.nonnegative && value < 0.0) {
                report_row_error(result, row, std::string("negative ") + f.name);
                ok = false;
                break;
            }
            rec.*(f.member) = value;
        }
        if (!ok) continue;

        if (columns.has("label") && columns.at("label") < cells.size()) {
            const std::string& lab = cells[columns.at("label")];
            if (!lab.empty()) rec.label = lab;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

ParseResult parse_flows_file(const std::string& path, const Schema& schema, char delimiter) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open flow file: " + path);
    return parse_flows(in, schema, delimiter);
}

double normalize_timestamps(std::vector<FlowRecord>& flows) {
    if (flows.empty()) return 0.0;
    double t0 = std::numeric_limits<double>::infinity();
    for (const FlowRecord& f : flows) t0 = std::min(t0, f.timestamp);
    for (FlowRecord& f : flows) f.timestamp -= t0;
    return t0;
}

EntityIndex build_entity_index(std::span<const FlowRecord> flows) {
    EntityIndex index;
    for (const FlowRecord& f : flows) {
        index.add(f.src_entity);
        index.add(f.dst_entity);
    }
    return index;
}

} // namespace nre
