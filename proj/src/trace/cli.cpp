#include "opsim/trace/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <ostream>

#include "opsim/dsl/parser.hpp"
#include "opsim/trace/stats.hpp"
#include "opsim/trace/trace.hpp"

namespace opsim::trace {

namespace {

int report_diagnostics(const std::vector<dsl::Diagnostic>& ds, const std::string& file, std::ostream& err) {
    for (const auto& d : ds) err << dsl::format_diagnostic(d, file) << '\n';
    return kExitInput;
}

std::optional<dsl::ModelDocument> load(const std::string& file, std::ostream& err) {
    dsl::ParseResult r = dsl::parse_file(file);
    if (!r.ok()) {
        report_diagnostics(r.diagnostics, file, err);
        return std::nullopt;
    }
    return std::move(r.document);
}

struct RunArgs {
    std::string file;
    std::uint64_t steps = 10;
    std::uint64_t seed = 0;
    std::string mode = "max";
    std::string bonds;
    bool death_releases = false;
    std::string format = "text";
    std::string out_path;
};

int do_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
    auto doc = load(a.file, err);
    if (!doc) return kExitInput;
    RunOptions opt;
    opt.steps = a.steps;
    opt.seed = a.seed;
    opt.mode = a.mode == "arb" ? pps::StepMode::ArbitraryParallel : pps::StepMode::MaximalParallel;
    if (!a.bonds.empty()) opt.bonds = a.bonds == "static" ? pps::BondMode::Static : pps::BondMode::Dynamic;
    opt.death_releases_objects = a.death_releases;
    if (doc->kind != dsl::Kind::Pps && (!a.bonds.empty() || a.death_releases || a.mode != "max")) {
        err << "warning: --mode, --bonds and --death-releases-objects only apply to pps models\n";
    }

    std::ofstream file;
    std::ostream* target = &out;
    if (!a.out_path.empty()) {
        file.open(a.out_path, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << a.out_path << ": error[E-IO]: cannot write output file\n";
            return kExitInput;
        }
        target = &file;
    }
    JsonlSink jsonl(*target);
    TextSink text(*target);
    Sink& sink = a.format == "jsonl" ? static_cast<Sink&>(jsonl) : static_cast<Sink&>(text);
    try {
        run_document(*doc, opt, sink);
    } catch (const Error& e) {
        err << a.file << ": runtime error[" << e.code() << "]: " << e.what();
        if (const auto* xe = dynamic_cast<const xm::XmError*>(&e); xe) err << " (" << xe->describe() << ")";
        err << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << a.file << ": runtime error[E-INTERNAL]: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

int do_stats(const std::string& path, bool csv, std::ostream& out, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << path << ": error[E-IO]: cannot read trace\n";
        return kExitInput;
    }
    try {
        Stats s = summarize(read_jsonl(in));
        csv ? write_csv(s, out) : write_table(s, out);
    } catch (const Error& e) {
        err << path << ": error[" << e.code() << "]: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}

int do_check(const std::string& path, std::ostream& out, std::ostream& err) {
    auto doc = load(path, err);
    if (!doc) return kExitInput;
    out << path << ": ok (" << dsl::kind_name(doc->kind) << ", digest " << dsl::digest(*doc) << ")\n";
    return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator for population P systems, communicating X-machines and OPERAS agent systems", "opsim"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a model and write its trace");
    run_cmd->add_option("file", run.file, "Model file (.opml)")->required();
    run_cmd->add_option("--steps", run.steps, "Number of steps")->capture_default_str();
    run_cmd->add_option("--seed", run.seed, "Random seed")->capture_default_str();
    run_cmd->add_option("--mode", run.mode, "Step mode (pps)")->check(CLI::IsMember({"max", "arb"}))->capture_default_str();
    run_cmd->add_option("--bonds", run.bonds, "Bond mode (pps)")->check(CLI::IsMember({"dynamic", "static"}));
    run_cmd->add_flag("--death-releases-objects", run.death_releases, "Dead cells release their contents (pps)");
    run_cmd->add_option("--format", run.format, "Trace format")->check(CLI::IsMember({"text", "jsonl"}))->capture_default_str();
    run_cmd->add_option("--out", run.out_path, "Write the trace here instead of standard output");

    std::string stats_path;
    bool csv = false;
    auto* stats_cmd = app.add_subcommand("stats", "Summarise a JSONL trace");
    stats_cmd->add_option("trace", stats_path, "Trace file (.jsonl)")->required();
    stats_cmd->add_flag("--csv", csv, "CSV instead of an aligned table");

    std::string check_path;
    auto* check_cmd = app.add_subcommand("check", "Parse and validate a model");
    check_cmd->add_option("file", check_path, "Model file (.opml)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const auto chosen = app.get_subcommands();
        out << (chosen.empty() ? app.help() : chosen.front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "opsim: " << e.what() << "\nRun with --help for more information.\n";
        return kExitInput;
    }

    if (run_cmd->parsed()) return do_run(run, out, err);
    if (stats_cmd->parsed()) return do_stats(stats_path, csv, out, err);
    if (check_cmd->parsed()) return do_check(check_path, out, err);
    return kExitInput;
}

}  // namespace opsim::trace
