#include "opsim/trace/stats.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>

namespace opsim::trace {

namespace {

std::int64_t sum(const Json& objects) {
    std::int64_t total = 0;
    for (const auto& [name, n] : objects.items()) total += n.get<std::int64_t>();
    return total;
}

void add_objects(std::map<std::string, std::int64_t>& into, const Json& objects) {
    for (const auto& [name, n] : objects.items()) into[name] += n.get<std::int64_t>();
}

StatsRow row_from(const std::string& kind, const Json& s) {
    StatsRow row;
    row.step = s.at("step").get<std::uint64_t>();
    if (kind == "pps") {
        for (const auto& c : s.at("cells")) {
            ++row.by_type[c.at("type").get<std::string>()];
            row.contents_total += sum(c.at("contents"));
        }
        row.population = static_cast<std::int64_t>(s.at("cells").size());
        row.edges = static_cast<std::int64_t>(s.at("bonds").size());
        add_objects(row.environment, s.at("environment"));
    } else if (kind == "operas") {
        for (const auto& a : s.at("agents")) ++row.by_type[a.at("type").get<std::string>()];
        row.population = static_cast<std::int64_t>(s.at("agents").size());
        row.edges = static_cast<std::int64_t>(s.at("channels").size());
        add_objects(row.environment, s.at("environment").at("totals"));
    } else if (kind == "cxm") {
        for (const auto& m : s.at("machines")) ++row.by_type[m.at("def").get<std::string>()];
        row.population = static_cast<std::int64_t>(s.at("machines").size());
        row.edges = static_cast<std::int64_t>(s.at("channels").size());
    } else {
        row.population = 1;
        ++row.by_type[s.at("state").get<std::string>()];
    }
    for (const auto& [name, n] : row.environment) row.env_total += n;
    return row;
}

std::vector<std::string> header(const Stats& stats) {
    std::vector<std::string> cols{"step", "population"};
    for (const auto& t : stats.types) cols.push_back(t);
    cols.push_back(stats.kind == "pps" ? "bonds" : "channels");
    for (const auto& s : stats.symbols) cols.push_back("env:" + s);
    cols.push_back("env_total");
    if (stats.kind == "pps") {
        cols.push_back("cells_total");
        cols.push_back("env+cells_total");
    }
    return cols;
}

std::vector<std::string> cells(const Stats& stats, const StatsRow& r) {
    std::vector<std::string> out{std::to_string(r.step), std::to_string(r.population)};
    auto lookup = [](const std::map<std::string, std::int64_t>& m, const std::string& k) {
        auto it = m.find(k);
        return std::to_string(it == m.end() ? 0 : it->second);
    };
    for (const auto& t : stats.types) out.push_back(lookup(r.by_type, t));
    out.push_back(std::to_string(r.edges));
    for (const auto& s : stats.symbols) out.push_back(lookup(r.environment, s));
    out.push_back(std::to_string(r.env_total));
    if (stats.kind == "pps") {
        out.push_back(std::to_string(r.contents_total));
        out.push_back(std::to_string(r.objects_total()));
    }
    return out;
}

}  // namespace

std::vector<Json> read_jsonl(std::istream& in) {
    std::vector<Json> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw TraceFormatError("line " + std::to_string(n) + " is not a JSON object");
        out.push_back(std::move(j));
    }
    return out;
}

Stats summarize(const std::vector<Json>& records) {
    Stats stats;
    try {
        if (records.empty() || records.front().value("record", "") != "header") {
            throw TraceFormatError("trace does not start with a header record");
        }
        const Json& h = records.front();
        if (h.value("v", 0) != kSchemaVersion) {
            throw TraceFormatError("unsupported trace schema version " + h.value("v", Json(nullptr)).dump());
        }
        stats.kind = h.at("kind").get<std::string>();
        if (stats.kind != "pps" && stats.kind != "xm" && stats.kind != "cxm" && stats.kind != "operas") {
            throw TraceFormatError("unknown model kind '" + stats.kind + "'");
        }
        std::set<std::string> types;
        std::set<std::string> symbols;
        for (std::size_t i = 1; i < records.size(); ++i) {
            if (records[i].value("record", "") != "snapshot") continue;
            StatsRow row = row_from(stats.kind, records[i]);
            for (const auto& [t, n] : row.by_type) types.insert(t);
            for (const auto& [s, n] : row.environment) symbols.insert(s);
            stats.rows.push_back(std::move(row));
        }
        stats.types.assign(types.begin(), types.end());
        stats.symbols.assign(symbols.begin(), symbols.end());
    } catch (const Json::exception& e) {
        throw TraceFormatError(std::string("malformed trace record: ") + e.what());
    }
    return stats;
}

void write_table(const Stats& stats, std::ostream& out) {
    const auto head = header(stats);
    std::vector<std::vector<std::string>> body;
    for (const auto& r : stats.rows) body.push_back(cells(stats, r));
    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
        for (const auto& row : body) width[c] = std::max(width[c], row[c].size());
    }
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << "  ";
            out << std::setw(static_cast<int>(width[c])) << row[c];
        }
        out << '\n';
    };
    emit(head);
    for (const auto& row : body) emit(row);
}

void write_csv(const Stats& stats, std::ostream& out) {
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c > 0 ? "," : "") << row[c];
        out << '\n';
    };
    emit(header(stats));
    for (const auto& r : stats.rows) emit(cells(stats, r));
}

}  // namespace opsim::trace
