#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfrule/io.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using cfrule::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Scratch directory holding the three-rule concept as a rule file.
struct Workspace {
    fs::path dir;

    Workspace()
    {
        dir = fs::temp_directory_path() / ("cfrule_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ofstream(dir / "rules.json")
            << R"([{"pos":[0,6],"neg":[1],"cf":0.9},{"pos":[0,4],"neg":[3],"cf":0.9},{"pos":[5,10],"cf":0.9}])";
    }
    ~Workspace() { fs::remove_all(dir); }

    std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("synth writes a reproducible CSV")
{
    Workspace ws;
    auto r = call({"synth", "--rules", ws("rules.json"), "--n", "100", "--d", "20", "--seed", "4", "--out",
                   ws("a.csv")});
    CHECK(r.code == 0);
    const auto first = slurp(ws("a.csv"));
    CHECK(lines(first) == 101);
    r = call({"synth", "--rules", ws("rules.json"), "--n", "100", "--d", "20", "--seed", "4", "--out", ws("b.csv")});
    CHECK(slurp(ws("b.csv")) == first);

    r = call({"synth", "--rules", ws("missing.json"), "--out", ws("c.csv")});
    CHECK(r.code == 2);
    CHECK(r.err.find("missing.json") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("train, extract and eval")
{
    Workspace ws;
    REQUIRE(call({"synth", "--rules", ws("rules.json"), "--seed", "3", "--out", ws("d.csv")}).code == 0);

    auto r = call({"train", "--data", ws("d.csv"), "--channels", "3", "--init", "mcro", "--seed", "5", "--out",
                   ws("m.json"), "--trace-out", ws("t.csv"), "--trace-stride", "5"});
    REQUIRE(r.code == 0);
    const auto model = cfrule::io::load_model(ws("m.json"));
    CHECK(model.size() == 3);
    const auto trace = slurp(ws("t.csv"));
    const auto epochs = lines(trace) - 1;
    CHECK(r.out.find("for " + std::to_string(epochs) + " epochs") != std::string::npos);

    r = call({"extract", "--model", ws("m.json"), "--data", ws("d.csv"), "--threshold", "auto", "--out",
              ws("x.json")});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("# threshold ", 0) == 0);
    CHECK(lines(r.out) == 4);
    const auto rules = cfrule::io::load_rules(ws("x.json"), 20);
    CHECK(rules.size() == 3);

    r = call({"eval", "--data", ws("d.csv"), "--rules", ws("x.json"), "--out", ws("e.json")});
    CHECK(r.code == 0);
    CHECK(r.out.find("rule error rate") != std::string::npos);

    // A rule on x16 cannot be scored against an 11-feature dataset.
    REQUIRE(call({"synth", "--rules", ws("rules.json"), "--d", "11", "--out", ws("narrow.csv")}).code == 0);
    std::ofstream(ws("wide_rules.json")) << R"([{"pos":[15],"cf":0.9}])";
    r = call({"eval", "--data", ws("narrow.csv"), "--rules", ws("wide_rules.json")});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("train exit codes")
{
    Workspace ws;
    REQUIRE(call({"synth", "--rules", ws("rules.json"), "--seed", "3", "--out", ws("d.csv")}).code == 0);
    auto r = call({"train", "--data", ws("d.csv"), "--epochs", "1", "--out", ws("m.json")});
    CHECK(r.code == 3);
    CHECK(fs::exists(ws("m.json")));

    r = call({"train", "--data", ws("d.csv"), "--channels", "0", "--out", ws("m.json")});
    CHECK(r.code == 2);
    r = call({"train", "--data", ws("d.csv"), "--init", "zeros", "--out", ws("m.json")});
    CHECK(r.code == 2);
    r = call({"train", "--data", ws("nope.csv"), "--out", ws("m.json")});
    CHECK(r.code == 2);
    r = call({"train", "--data", ws("d.csv"), "--lr", "-1", "--out", ws("m.json")});
    CHECK(r.code == 2);
    r = call({"frobnicate"});
    CHECK(r.code == 2);
    r = call({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("train") != std::string::npos);
}

TEST_CASE("extract reports dead channels")
{
    Workspace ws;
    std::ofstream(ws("m.json")) << R"({"version":1,"dim":3,"channels":[)"
                                << R"({"u":0.9,"bias":1,"w":[1,0,-1]},{"u":0.5,"bias":0.2,"w":[0,0,0]}]})";
    auto r = call({"extract", "--model", ws("m.json"), "--threshold", "0.5"});
    CHECK(r.code == 0);
    CHECK(r.out == "IF x1 AND NOT x3 THEN class CF=0.90\n");
    CHECK(r.err.find("channel 2") != std::string::npos);

    r = call({"extract", "--model", ws("m.json"), "--threshold", "1.5"});
    CHECK(r.code == 2);
    r = call({"extract", "--model", ws("m.json"), "--threshold", "auto"});
    CHECK(r.code == 2);
}

TEST_CASE("config file values yield to flags")
{
    Workspace ws;
    REQUIRE(call({"synth", "--rules", ws("rules.json"), "--seed", "3", "--out", ws("d.csv")}).code == 0);
    std::ofstream(ws("cfg.json")) << R"({"epochs": 1, "channels": 2, "seed": 9})";
    auto r = call({"--config", ws("cfg.json"), "train", "--data", ws("d.csv"), "--out", ws("m.json")});
    CHECK(r.code == 3);
    CHECK(cfrule::io::load_model(ws("m.json")).size() == 2);
    r = call({"--config", ws("cfg.json"), "train", "--data", ws("d.csv"), "--epochs", "1000", "--out",
              ws("m.json")});
    CHECK(r.code == 0);

    std::ofstream(ws("bad.json")) << R"({"epochs": "many"})";
    r = call({"--config", ws("bad.json"), "train", "--data", ws("d.csv"), "--out", ws("m.json")});
    CHECK(r.code == 2);
}

TEST_CASE("every subcommand is byte-for-byte repeatable")
{
    Workspace ws;
    REQUIRE(call({"synth", "--rules", ws("rules.json"), "--seed", "3", "--out", ws("d.csv")}).code == 0);
    const std::vector<std::vector<std::string>> commands{
        {"train", "--data", ws("d.csv"), "--shuffle", "--seed", "2", "--out", ws("OUT"), "--trace-out", ws("T"),
         "--trace-stride", "1"},
        {"extract", "--model", ws("m.json"), "--data", ws("d.csv"), "--threshold", "auto", "--out", ws("OUT")},
        {"cv", "--data", ws("d.csv"), "--repeats", "2", "--threshold", "auto", "--out", ws("OUT")},
        {"compare", "--trials", "3", "--threshold", "auto", "--out", ws("OUT")},
    };
    REQUIRE(call({"train", "--data", ws("d.csv"), "--out", ws("m.json")}).code == 0);
    for (auto cmd : commands) {
        const auto a = call(cmd);
        const auto a_file = slurp(ws("OUT"));
        const auto a_trace = slurp(ws("T"));
        fs::remove(ws("OUT"));
        const auto b = call(cmd);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
        CHECK(a.err == b.err);
        CHECK(slurp(ws("OUT")) == a_file);
        CHECK(slurp(ws("T")) == a_trace);
        CHECK_FALSE(a_file.empty());
    }

    // Thread count does not change the result.
    const auto one = call({"compare", "--trials", "3", "--threads", "1"});
    const auto many = call({"compare", "--trials", "3", "--threads", "4"});
    CHECK(one.out == many.out);
}
