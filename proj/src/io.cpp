#include "nre/io.hpp"

#include "nre/log.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace nre {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& s, const std::string& context) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error(context + ": expected a number, got '" + s + "'");
    return v;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

std::ofstream create_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create file: " + path);
    out << std::setprecision(17);
    return out;
}

std::string next_line(std::ifstream& in, bool& ok) {
    std::string line;
    ok = static_cast<bool>(std::getline(in, line));
    if (ok && !line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

} // namespace

std::map<std::string, std::string> read_key_value(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const std::size_t eq = content.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

void write_key_value(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& items) {
    std::ofstream out = create_or_throw(path);
    for (const auto& [key, value] : items) out << key << " = " << value << "\n";
}

void write_graph_csv(const std::string& path, const ConnectivityGraph& graph,
                     const EntityIndex& entities) {
    if (entities.size() != graph.size())
        throw std::invalid_argument("write_graph_csv: entity count mismatch");
    std::ofstream out = create_or_throw(path);
    out << "entity";
    for (const std::string& id : entities.ids()) out << "," << id;
    out << "\n";
    for (std::size_t i = 0; i < graph.size(); ++i) {
        out << entities.id_of(i);
        for (std::size_t j = 0; j < graph.size(); ++j) out << "," << graph.weights(i, j);
        out << "\n";
    }
}

void write_partition_csv(const std::string& path, const EntityIndex& entities,
                         const Partition& partition) {
    if (entities.size() != partition.assignment.size())
        throw std::invalid_argument("write_partition_csv: entity count mismatch");
    std::ofstream out = create_or_throw(path);
    out << "entity,group\n";
    for (std::size_t i = 0; i < entities.size(); ++i)
        out << entities.id_of(i) << "," << partition.assignment[i] << "\n";
}

std::pair<EntityIndex, Partition> read_partition_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    bool ok = false;
    std::string line = next_line(in, ok);
    if (!ok) throw std::runtime_error(path + ": empty partition file");

    EntityIndex entities;
    Partition partition;
    int max_group = -1;
    while (true) {
        line = next_line(in, ok);
        if (!ok) break;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() < 2) throw std::runtime_error(path + ": expected 'entity,group' rows");
        const std::size_t index = entities.add(cells[0]);
        if (index + 1 != entities.size())
            throw std::runtime_error(path + ": duplicate entity '" + cells[0] + "'");
        const int group = static_cast<int>(to_double(cells[1], path));
        if (group < 0) throw std::runtime_error(path + ": negative group id");
        partition.assignment.push_back(group);
        max_group = std::max(max_group, group);
    }
    partition.group_count = max_group + 1;
    if (partition.assignment.empty()) throw std::runtime_error(path + ": no partition rows");
    return {std::move(entities), std::move(partition)};
}

std::vector<MeasurementRow> read_measurements_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    bool ok = false;
    std::string line = next_line(in, ok);
    if (!ok) throw std::runtime_error(path + ": empty measurements file");
    std::vector<MeasurementRow> rows;
    while (true) {
        line = next_line(in, ok);
        if (!ok) break;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() < 4)
            throw std::runtime_error(path + ": expected 'time,entity,value,variance' rows");
        MeasurementRow row;
        row.time = to_double(cells[0], path);
        row.entity = cells[1];
        row.value = to_double(cells[2], path);
        row.variance = to_double(cells[3], path);
        if (row.variance < 0.0) throw std::runtime_error(path + ": negative variance");
        rows.push_back(std::move(row));
    }
    return rows;
}

Topology read_topology_csv(const std::string& path, const EntityIndex& entities) {
    std::ifstream in = open_or_throw(path);
    bool ok = false;
    std::string line = next_line(in, ok);
    if (!ok) throw std::runtime_error(path + ": empty topology file");
    Topology topo(entities.size());
    while (true) {
        line = next_line(in, ok);
        if (!ok) break;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() < 2) throw std::runtime_error(path + ": expected 'entity,entity' rows");
        const std::size_t a = entities.find(cells[0]);
        const std::size_t b = entities.find(cells[1]);
        if (a == EntityIndex::npos || b == EntityIndex::npos) {
            warn("topology: skipping edge with unknown entity (" + cells[0] + "," + cells[1] + ")");
            continue;
        }
        if (a != b) topo.add_edge(a, b);
    }
    return topo;
}

void append_risk_rows(std::ostream& out, double time, const EntityIndex& entities,
                      const Vector& mean, const Vector& variance) {
    for (std::size_t i = 0; i < entities.size(); ++i)
        out << time << "," << entities.id_of(i) << "," << mean[i] << "," << variance[i] << "\n";
}

std::vector<RiskRow> read_risk_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    bool ok = false;
    std::string line = next_line(in, ok);
    if (!ok) throw std::runtime_error(path + ": empty risk file");
    std::vector<RiskRow> rows;
    while (true) {
        line = next_line(in, ok);
        if (!ok) break;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() < 4)
            throw std::runtime_error(path + ": expected 'time,entity,mean,variance' rows");
        RiskRow row;
        row.time = to_double(cells[0], path);
        row.entity = cells[1];
        row.mean = to_double(cells[2], path);
        row.variance = to_double(cells[3], path);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace nre
