#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opsim/dsl/document.hpp"
#include "opsim/pps/engine.hpp"

namespace opsim::trace {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::json;

struct RunOptions {
    std::uint64_t steps = 10;
    std::uint64_t seed = 0;
    pps::StepMode mode = pps::StepMode::MaximalParallel;
    std::optional<pps::BondMode> bonds;  // pps only; unset picks the model default
    bool death_releases_objects = false;
};

/// Receives header, snapshot and terminal records in order.
class Sink {
   public:
    virtual ~Sink() = default;
    virtual void record(const Json& record) = 0;
};

/// One compact JSON object per line, keys sorted.
class JsonlSink : public Sink {
   public:
    explicit JsonlSink(std::ostream& out) : out_(out) {}
    void record(const Json& record) override;

   private:
    std::ostream& out_;
};

/// Human-readable animation, one block per step.
class TextSink : public Sink {
   public:
    explicit TextSink(std::ostream& out) : out_(out) {}
    void record(const Json& record) override;

   private:
    std::ostream& out_;
    std::string kind_;
};

/// Keeps every record, for tests.
class MemorySink : public Sink {
   public:
    void record(const Json& record) override { records.push_back(record); }
    std::vector<Json> records;
};

struct RunSummary {
    std::uint64_t steps_completed = 0;
    std::optional<std::uint64_t> halted_at;
};

/// Runs the document's engine, streaming records into `sink`. A runtime
/// failure writes an error terminal record, then rethrows.
RunSummary run_document(const dsl::ModelDocument& doc, const RunOptions& options, Sink& sink);

/// FNV-1a 64 as 16 hex digits.
std::string fnv_hex(const std::string& text);

std::string mode_name(pps::StepMode mode);
std::string bond_mode_name(pps::BondMode mode);

}  // namespace opsim::trace
