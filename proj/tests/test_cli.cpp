#include "expforge/cli.hpp"

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

namespace fs = std::filesystem;
using expforge::cli::run;

namespace {

const std::string kData = EXPFORGE_TEST_DATA;
const std::string kModel = kData + "/binary_dms.json";

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    static std::atomic<int> counter{0};
    const fs::path p = fs::temp_directory_path() /
                       ("expforge_cli_" + std::to_string(::getpid()) + "_" + name + std::to_string(counter++));
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

}  // namespace

TEST_CASE("exponents writes the CSV contract") {
    const Result r = invoke({"exponents", "--config", kModel, "--grid", "1000"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "m,l,E_star_bits,grid_denominator");
    CHECK(r.out.find("1,R,0.0506801779,1000") != std::string::npos);
    CHECK(r.out.find("1,2,2.03399878,1000") != std::string::npos);

    const fs::path out = scratch("exp");
    fs::create_directories(out);
    CHECK(invoke({"exponents", "--config", kModel, "--grid", "1000", "--out", (out / "exp.csv").string()}).code == 0);
    CHECK(slurp(out / "exp.csv") == r.out);
    fs::remove_all(out);
}

TEST_CASE("vacuous rejection region prints inf") {
    const fs::path dir = scratch("huge");
    fs::create_directories(dir);
    write_file(dir / "m.json", R"({"alphabet": ["a", "b"],
        "hypotheses": [{"name": "H1", "matrix": [[0.9, 0.1]]}, {"name": "H2", "matrix": [[0.1, 0.9]]}],
        "thresholds": {"E": [50, 50]}})");
    const Result r = invoke({"exponents", "--config", (dir / "m.json").string(), "--grid", "100"});
    CHECK(r.code == 0);
    CHECK(r.out.find("1,R,inf,100") != std::string::npos);
    CHECK(r.err.find("B_R is empty") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("classify prints a verdict line per sequence") {
    const Result r = invoke({"classify", "--config", kModel, "--sequence", "aaaaaaaaab"});
    CHECK(r.code == 0);
    CHECK(r.out == "verdict=Accept(1) d=[0,2.53594] margin=0.05\n");

    const fs::path dir = scratch("seq");
    fs::create_directories(dir);
    write_file(dir / "seqs.txt", "aaaaaaaaab\nababababab\n\nbbbbbbbbba\n");
    const Result many = invoke({"classify", "--config", kModel, "--sequence-file", (dir / "seqs.txt").string()});
    CHECK(many.code == 0);
    CHECK(many.out.find("verdict=Reject") != std::string::npos);
    CHECK(many.out.find("verdict=Accept(2)") != std::string::npos);
    CHECK(std::count(many.out.begin(), many.out.end(), '\n') == 3);
    fs::remove_all(dir);

    CHECK(invoke({"classify", "--config", kModel, "--sequence", "abc"}).code == 1);
    CHECK(invoke({"classify", "--config", kModel}).code == 1);
}

TEST_CASE("region and optimality reports") {
    const Result in = invoke({"check-region", "--config", kModel, "--grid", "1000"});
    CHECK(in.code == 0);
    CHECK(in.out == "InRegion resolution=1000\n");

    const Result opt = invoke({"check-optimality", "--config", kModel});
    CHECK(opt.code == 0);
    CHECK(opt.out == "Satisfied\n");

    const fs::path dir = scratch("ten");
    fs::create_directories(dir);
    write_file(dir / "m.json", R"({"alphabet": ["a", "b"],
        "hypotheses": [{"name": "H1", "matrix": [[0.9, 0.1]]}, {"name": "H2", "matrix": [[0.1, 0.9]]}],
        "thresholds": {"E": [10, 10]}})");
    const Result out = invoke({"check-region", "--config", (dir / "m.json").string(), "--grid", "200"});
    CHECK(out.code == 0);
    CHECK(out.out.rfind("OutOfRegion clause=1 witness=[0.9,0.1]", 0) == 0);
    const Result bad = invoke({"check-optimality", "--config", (dir / "m.json").string(), "--grid", "200"});
    CHECK(bad.out.rfind("Violated\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("simulate is byte-identical across runs and thread counts") {
    const fs::path a = scratch("sim_a");
    const fs::path b = scratch("sim_b");
    const std::vector<std::string> base{"simulate", "--config", kModel, "--lengths", "20,40", "--trials", "500",
                                        "--seed", "42"};
    auto with = [&](const fs::path& dir, const std::string& threads) {
        auto args = base;
        args.insert(args.end(), {"--out", dir.string(), "--threads", threads});
        return invoke(args);
    };
    CHECK(with(a, "1").code == 0);
    CHECK(with(b, "3").code == 0);
    CHECK(slurp(a / "rates.csv") == slurp(b / "rates.csv"));
    CHECK(slurp(a / "fit.csv") == slurp(b / "fit.csv"));
    const std::string rates = slurp(a / "rates.csv");
    CHECK(rates.rfind("N,strategy,outcome,count,trials,rate,wilson_low,wilson_high\n", 0) == 0);
    CHECK(slurp(a / "fit.csv").rfind("error_kind,status,slope_bits_per_symbol", 0) == 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("plot-data emits one row per grid point") {
    const Result r = invoke({"plot-data", "--config", kModel, "--plot-resolution", "10"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 12);
}

TEST_CASE("exit codes") {
    CHECK(invoke({"exponents", "--config", kData + "/bad_row.json"}).code == 1);
    CHECK(invoke({"exponents", "--config", kData + "/nope.json"}).code == 1);
    CHECK(invoke({"exponents"}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({"exponents", "--config", kModel, "--path", "sideways"}).code == 1);
    CHECK(invoke({"classify", "--config", kData + "/avs_binary.json", "--path", "dms", "--sequence", "ab"}).code == 1);
    CHECK(invoke({"exponents", "--config", kModel, "--grid", "100000000"}).code == 2);
    CHECK(invoke({"simulate", "--config", kModel, "--lengths", "20,10"}).code == 1);

    ::setenv("EXPFORGE_TYPE_CAP", "50", 1);
    CHECK(invoke({"exponents", "--config", kModel, "--grid", "100"}).code == 2);
    ::setenv("EXPFORGE_TYPE_CAP", "zero", 1);
    CHECK(invoke({"exponents", "--config", kModel, "--grid", "100"}).code == 1);
    ::unsetenv("EXPFORGE_TYPE_CAP");
    CHECK(invoke({"exponents", "--config", kModel, "--grid", "100"}).code == 0);
}
