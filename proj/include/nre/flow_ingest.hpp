#ifndef NRE_FLOW_INGEST_HPP
#define NRE_FLOW_INGEST_HPP

#include "nre/flow_record.hpp"

#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace nre {

/// Bijective map between entity identifiers (e.g. IP addresses) and dense
/// indices 0..n-1, in first-appearance order. Stable for one pipeline run.
class EntityIndex {
public:
    /// Returns the index of `id`, inserting it if unseen.
    std::size_t add(const std::string& id);

    /// Index of a known id, or npos.
    std::size_t find(const std::string& id) const;

    const std::string& id_of(std::size_t index) const { return ids_[index]; }
    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

/// Maps canonical field names to the column headers of a particular
/// dataset. Keys are the FlowRecord field names; `label` is optional,
/// every other field is mandatory.
using Schema = std::map<std::string, std::string>;

/// Identity schema: column headers equal the canonical field names.
Schema default_schema();

struct ParseResult {
    std::vector<FlowRecord> records;
    std::size_t rows_total = 0;    // data rows seen (header excluded)
    std::size_t rows_skipped = 0;  // rows dropped with an error
    std::vector<std::string> errors;  // first few row error messages
};

/// Parses delimiter-separated flow text with a header row. Rows that fail
/// numeric parsing or violate field invariants are skipped and counted.
/// Throws std::runtime_error when a mandatory column is missing.
///
/// Timestamps may be numeric seconds or "m/d/Y H:M[:S]" datetimes (parsed
/// as UTC epoch seconds). Values are kept verbatim; use
/// normalize_timestamps() to rebase a run to its earliest record.
ParseResult parse_flows(std::istream& source, const Schema& schema, char delimiter = ',');

/// Convenience overload opening a file.
ParseResult parse_flows_file(const std::string& path, const Schema& schema, char delimiter = ',');

/// Shifts all timestamps so the earliest becomes 0. Returns the offset that
/// was subtracted.
double normalize_timestamps(std::vector<FlowRecord>& flows);

/// Distinct src/dst identifiers in first-appearance order.
EntityIndex build_entity_index(std::span<const FlowRecord> flows);

} // namespace nre

#endif
