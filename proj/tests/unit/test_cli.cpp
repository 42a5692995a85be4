#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "opsim/trace/cli.hpp"

using namespace opsim::trace;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "opsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    Outcome o;
    o.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::string corpus(const std::string& name) { return std::string(OPSIM_CORPUS_DIR) + "/" + name + ".opml"; }

std::filesystem::path scratch(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / ("opsim-unit-" + name);
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and version succeed") {
    CHECK(cli({"--help"}).code == kExitOk);
    CHECK(cli({"run", "--help"}).out.find("--steps") != std::string::npos);
    const Outcome v = cli({"--version"});
    CHECK(v.code == kExitOk);
    CHECK(v.out == "0.1.0\n");
}

TEST_CASE("usage errors exit 1") {
    CHECK(cli({}).code == kExitInput);
    CHECK(cli({"frobnicate"}).code == kExitInput);
    CHECK(cli({"run"}).code == kExitInput);
    CHECK(cli({"run", corpus("echo"), "--steps", "many"}).code == kExitInput);
    CHECK(cli({"run", corpus("echo"), "--format", "xml"}).code == kExitInput);
}

TEST_CASE("check reports the kind and digest") {
    const Outcome o = cli({"check", corpus("diffusion")});
    CHECK(o.code == kExitOk);
    CHECK(o.out.find(": ok (pps, digest ") != std::string::npos);
}

TEST_CASE("bad models exit 1 with located diagnostics") {
    const auto p = scratch("bad.opml", "pps {\n  alphabet a;\n  types t;\n  cell t {b};\n}\n");
    const Outcome o = cli({"check", p.string()});
    CHECK(o.code == kExitInput);
    CHECK(o.err.find(":4:11: error[E-UNDECLARED-SYMBOL]") != std::string::npos);
    CHECK(cli({"run", p.string()}).code == kExitInput);
    CHECK(cli({"check", corpus("absent")}).code == kExitInput);
}

TEST_CASE("runtime failures exit 2") {
    const auto p = scratch("stuck.opml", "xm Stuck { inputs a b; states S; initial S; "
                                         "function f : stream -> stream { guard input == 'a; } "
                                         "transition S -> S via f; stream a b; }");
    const Outcome o = cli({"run", p.string(), "--format", "jsonl"});
    CHECK(o.code == kExitRuntime);
    CHECK(o.err.find("E-NO-APPLICABLE-FUNCTION") != std::string::npos);
    CHECK(o.out.find("\"status\":\"error\"") != std::string::npos);
}

TEST_CASE("run writes jsonl to a file and stats reads it back") {
    const auto trace = std::filesystem::temp_directory_path() / "opsim-unit-trace.jsonl";
    const Outcome r = cli({"run", corpus("diffusion"), "--steps", "3", "--format", "jsonl", "--out", trace.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
    const Outcome s = cli({"stats", trace.string(), "--csv"});
    CHECK(s.code == kExitOk);
    CHECK(s.out.rfind("step,population", 0) == 0);
    CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 5);
}

TEST_CASE("stats on a bad trace exits 1") {
    const auto p = scratch("junk.jsonl", "hello\n");
    CHECK(cli({"stats", p.string()}).code == kExitInput);
    CHECK(cli({"stats", "/nonexistent/trace.jsonl"}).code == kExitInput);
}

TEST_CASE("unwritable output exits 1") {
    const Outcome o = cli({"run", corpus("echo"), "--out", "/nonexistent/dir/trace.jsonl"});
    CHECK(o.code == kExitInput);
    CHECK(o.err.find("E-IO") != std::string::npos);
}

TEST_CASE("pps-only options warn on other kinds") {
    const Outcome o = cli({"run", corpus("echo"), "--bonds", "static"});
    CHECK(o.code == kExitOk);
    CHECK(o.err.find("warning:") != std::string::npos);
}

}
