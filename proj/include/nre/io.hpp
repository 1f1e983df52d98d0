#ifndef NRE_IO_HPP
#define NRE_IO_HPP

#include "nre/connectivity.hpp"
#include "nre/flow_ingest.hpp"
#include "nre/partition.hpp"
#include "nre/routing.hpp"

#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace nre {

/// One sparse risk observation as read from a measurements file. Times are
/// on the same clock as the (normalized) flow timestamps.
struct MeasurementRow {
    double time = 0.0;
    std::string entity;
    double value = 0.0;
    double variance = 0.0;
};

/// "key = value" text files; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> read_key_value(const std::string& path);
void write_key_value(const std::string& path, const std::vector<std::pair<std::string, std::string>>& items);

/// Square weight matrix with entity identifiers as header row/column.
void write_graph_csv(const std::string& path, const ConnectivityGraph& graph,
                     const EntityIndex& entities);

/// Two-column partition file (entity, group), rows in entity-index order
/// so reloading reconstructs the index.
void write_partition_csv(const std::string& path, const EntityIndex& entities,
                         const Partition& partition);
std::pair<EntityIndex, Partition> read_partition_csv(const std::string& path);

/// Measurements: header "time,entity,value,variance".
std::vector<MeasurementRow> read_measurements_csv(const std::string& path);

/// Topology: two-column edge list of entity identifiers with a header row.
/// Unknown identifiers (not in `entities`) are skipped with a warning.
Topology read_topology_csv(const std::string& path, const EntityIndex& entities);

/// Risk snapshots: header "time,entity,mean,variance".
struct RiskRow {
    double time = 0.0;
    std::string entity;
    double mean = 0.0;
    double variance = 0.0;
};
void append_risk_rows(std::ostream& out, double time, const EntityIndex& entities,
                      const Vector& mean, const Vector& variance);
std::vector<RiskRow> read_risk_csv(const std::string& path);

} // namespace nre

#endif
