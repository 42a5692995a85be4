#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "opsim/trace/trace.hpp"

namespace opsim::trace {

class TraceFormatError : public Error {
   public:
    explicit TraceFormatError(const std::string& message) : Error("E-TRACE", message) {}
};

struct StatsRow {
    std::uint64_t step = 0;
    std::int64_t population = 0;
    std::map<std::string, std::int64_t> by_type;
    std::int64_t edges = 0;  // bonds or channels
    std::map<std::string, std::int64_t> environment;
    std::int64_t env_total = 0;
    std::int64_t contents_total = 0;  // objects inside cells (pps)
    std::int64_t objects_total() const { return env_total + contents_total; }
};

struct Stats {
    std::string kind;
    std::vector<std::string> types;    // union over all rows, sorted
    std::vector<std::string> symbols;  // environment symbols, sorted
    std::vector<StatsRow> rows;
};

/// Throws TraceFormatError on malformed input.
Stats summarize(const std::vector<Json>& records);
std::vector<Json> read_jsonl(std::istream& in);

void write_table(const Stats& stats, std::ostream& out);
void write_csv(const Stats& stats, std::ostream& out);

}  // namespace opsim::trace
