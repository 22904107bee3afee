#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(XY_LOOPS_BIN) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path temp_dir() {
    fs::path d = fs::temp_directory_path() / ("xyloops_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run("--help").code, 0); }

TEST(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(run("frobnicate").code, 2); }

TEST(Cli, GraphCheckBox) {
    RunResult r = run("graph check --box 3");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["vertices"], 9);
    EXPECT_EQ(j["edges"], 12);
    EXPECT_EQ(j["faces"], 5);
    EXPECT_EQ(j["euler_ok"], true);
}

TEST(Cli, GraphCheckFileAndMalformedInput) {
    fs::path d = temp_dir();
    write_file(d / "tri.json", R"({"vertices":["a","b","c"],"rotation":{"a":["b","c"],"b":["c","a"],"c":["a","b"]},
                                   "couplings":{"a-b":1,"b-c":1,"a-c":1}})");
    RunResult ok = run("graph check " + (d / "tri.json").string());
    ASSERT_EQ(ok.code, 0);
    EXPECT_EQ(nlohmann::json::parse(ok.out)["faces"], 2);

    write_file(d / "bad.json", R"({"vertices":["a","b"],"rotation":{"a":["b"],"b":["a"]},"couplings":{"a-b":0}})");
    EXPECT_EQ(run("graph check " + (d / "bad.json").string()).code, 2);
    write_file(d / "junk.json", "{not json");
    EXPECT_EQ(run("graph check " + (d / "junk.json").string()).code, 2);
    fs::remove_all(d);
}

TEST(Cli, BesselReportsThresholds) {
    RunResult r = run("bessel --k 2 --betas 1,2");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["lammers"]["threshold"].get<double>(), 1.1593199207501383, 1e-10);
    EXPECT_NEAR(j["triangulation"]["threshold"].get<double>(), 4.1164307918167093, 1e-10);
}

TEST(Cli, ExactCorrelatorOnEdge) {
    RunResult r = run("exact --builtin edge --beta 1 --a 0 --b 1");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    // I_1(1)/I_0(1)
    EXPECT_NEAR(j["ratio"].get<double>(), 0.4463899658965345, 1e-9);
    EXPECT_EQ(j["certified"], true);
}

TEST(Cli, SampleNeedsSeed) { EXPECT_EQ(run("sample --builtin cycle4 --beta 1 --samples 10").code, 2); }

TEST(Cli, SampleIsDeterministicAndAtomic) {
    fs::path d = temp_dir();
    std::string args = "sample --builtin cycle4 --beta 1 --seed 3 --burnin 10 --samples 500 --observables energy corr:0:2";
    ASSERT_EQ(run(args + " --out " + (d / "a.csv").string()).code, 0);
    ASSERT_EQ(run(args + " --out " + (d / "b.csv").string()).code, 0);
    std::string a = read_file(d / "a.csv");
    EXPECT_EQ(a, read_file(d / "b.csv"));
    EXPECT_EQ(a.rfind("# xy-loops schema v1", 0), 0u);
    EXPECT_NE(a.find("observable,mean,stderr,ess,n"), std::string::npos);
    EXPECT_FALSE(fs::exists(d / "a.csv.tmp"));
    fs::remove_all(d);
}

TEST(Cli, ConfigFileFillsOptions) {
    fs::path d = temp_dir();
    write_file(d / "cfg.json", R"({"sample": {"beta": 1.0, "seed": 4, "samples": 200, "burnin": 5}})");
    RunResult from_config = run("sample --builtin edge --observables corr:0:1 --config " + (d / "cfg.json").string());
    RunResult explicit_args = run("sample --builtin edge --observables corr:0:1 --beta 1 --seed 4 --samples 200 --burnin 5");
    ASSERT_EQ(from_config.code, 0);
    ASSERT_EQ(explicit_args.code, 0);
    EXPECT_EQ(from_config.out, explicit_args.out);
    // command line wins over the config file
    RunResult overridden = run("sample --builtin edge --observables corr:0:1 --seed 5 --config " + (d / "cfg.json").string());
    ASSERT_EQ(overridden.code, 0);
    EXPECT_NE(overridden.out, from_config.out);
    fs::remove_all(d);
}

TEST(Cli, VerifyBesselPasses) {
    RunResult r = run("verify bessel");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["failures"], 0);
}

TEST(Cli, VerifyInequalitiesNeedsSeed) { EXPECT_EQ(run("verify inequalities").code, 2); }
