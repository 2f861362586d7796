// Runs the gpc binary end to end against the files in tests/data.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

fs::path run_root() {
    static const fs::path root = [] {
        auto p = fs::temp_directory_path() / "gpc_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

std::string data(const std::string& name) { return std::string(GPC_TEST_DATA) + "/" + name; }

// stderr goes to the test log; stdout is captured.
Result gpc(const std::string& args) {
    const std::string cmd = "GPC_RUN_ROOT='" + run_root().string() + "' '" + GPC_CLI + "' " + args;
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// The "digest" field of a report, read without a JSON library.
std::string digest_of(const std::string& report) {
    const std::string key = "\"digest\": \"";
    const auto at = report.find(key);
    if (at == std::string::npos) return {};
    return report.substr(at + key.size(), 16);
}

}  // namespace

TEST(Cli, HelpAndVersion) {
    EXPECT_EQ(gpc("--help").code, 0);
    const auto v = gpc("--version");
    EXPECT_EQ(v.code, 0);
    EXPECT_FALSE(v.out.empty());
}

TEST(Cli, UsageErrorsAreInvalidInput) {
    EXPECT_EQ(gpc("").code, 4);
    EXPECT_EQ(gpc("frobnicate").code, 4);
    EXPECT_EQ(gpc("solve").code, 4);
    EXPECT_EQ(gpc("solve /nonexistent.json").code, 4);
    EXPECT_EQ(gpc("solve " + data("quarter_log.json") + " --set seed").code, 4);
    EXPECT_EQ(gpc("solve " + data("quarter_log.json") + " --set no.such=1").code, 4);
    EXPECT_EQ(gpc("solve " + data("quarter_measure.json")).code, 4);  // not a solve problem
}

TEST(Cli, MalformedFilesAreInvalidInput) {
    EXPECT_EQ(gpc("measure " + data("bad_syntax.json")).code, 4);
    EXPECT_EQ(gpc("solve " + data("bad_mu_length.json")).code, 4);
    EXPECT_EQ(gpc("measure " + data("bad_unit.json")).code, 4);
}

TEST(Cli, InfeasibleWeightExitsThree) { EXPECT_EQ(gpc("solve -q " + data("infeasible_unnormalized.json")).code, 3); }

TEST(Cli, NonConvergenceExitsTwoAndStillReports) {
    const auto r = gpc("solve " + data("quarter_surface.json") + " --max-iters 1");
    EXPECT_EQ(r.code, 2);
    const auto dir = run_root() / digest_of(r.out);
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    EXPECT_NE(slurp(dir / "report.json").find("\"status\": \"not_converged\""), std::string::npos);
}

TEST(Cli, SolveWritesRunDirectory) {
    const auto r = gpc("solve " + data("quarter_log.json"));
    ASSERT_EQ(r.code, 0);
    const auto digest = digest_of(r.out);
    ASSERT_EQ(digest.size(), 16u);
    const auto dir = run_root() / digest;
    for (const char* f : {"report.json", "run.json", "problem.json", "trace.csv"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    EXPECT_EQ(slurp(dir / "report.json"), r.out);
    EXPECT_EQ(slurp(dir / "trace.csv").rfind("iteration,phase,objective,residual,gamma,gamma_err,c,c_err\n", 0), 0u);
}

TEST(Cli, ReportsAreByteIdenticalAcrossRuns) {
    const auto first = gpc("measure " + data("quarter_measure.json"));
    ASSERT_EQ(first.code, 0);
    const auto dir = run_root() / digest_of(first.out);
    fs::remove_all(dir);
    const auto second = gpc("measure " + data("quarter_measure.json"));
    ASSERT_EQ(second.code, 0);
    EXPECT_EQ(first.out, second.out);
    // Reuse of the existing directory returns the same bytes too.
    EXPECT_EQ(gpc("measure " + data("quarter_measure.json")).out, first.out);
}

TEST(Cli, OverridesChangeTheDigest) {
    const auto a = gpc("measure -q " + data("quarter_measure.json"));
    const auto b = gpc("measure " + data("quarter_measure.json") + " --seed 12");
    const auto c = gpc("measure " + data("quarter_measure.json") + " --set seed=12");
    ASSERT_EQ(b.code, 0);
    EXPECT_TRUE(a.out.empty());
    EXPECT_EQ(b.out, c.out);
    EXPECT_NE(digest_of(b.out), "");
}

TEST(Cli, VerifyPasses) {
    const auto r = gpc("verify " + data("quarter_verify.json"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find("\"passed\": false"), std::string::npos);
    EXPECT_NE(r.out.find("ehrhard_wulff"), std::string::npos);
}

TEST(Cli, CounterexampleWritesScan) {
    const auto r = gpc("counterexample " + data("quarter_counterexample.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\"shapes_distinct\": true"), std::string::npos);
    EXPECT_NE(r.out.find("\"precondition\": false"), std::string::npos);
    const auto dir = run_root() / digest_of(r.out);
    EXPECT_EQ(slurp(dir / "scan.csv").rfind("t,g,g_err,h,h_err,S,S_err,C,C_err\n", 0), 0u);
}

TEST(Cli, ScanToFile) {
    const auto out = run_root() / "scan.csv";
    const auto r = gpc("scan " + data("quarter_counterexample.json") + " --count 6 --samples 20000 -o '" + out.string() + "'");
    ASSERT_EQ(r.code, 0);
    const auto text = slurp(out);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
    EXPECT_EQ(gpc("scan " + data("quarter_measure.json")).code, 4);  // no direction b
}
