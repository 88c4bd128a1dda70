// End-to-end runs of the command-line binary: output formats, exit codes,
// determinism, and agreement with in-process library results.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "envar/envar.hpp"

namespace {

namespace fs = std::filesystem;
using envar::Json;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Runs through /bin/sh so tests can prepend environment assignments.
RunResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(ENVAR_CLI_PATH) + " " +
                            args + " 2>/tmp/envar_cli_stderr.txt";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) r.out.append(buffer, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string last_stderr() {
    std::ifstream in("/tmp/envar_cli_stderr.txt");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

class CliTest : public ::testing::Test {
  protected:
    fs::path dir_;

    void SetUp() override {
        dir_ = fs::temp_directory_path() / "envar_cli_test";
        fs::create_directories(dir_);
    }

    fs::path write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        std::ofstream out(p);
        out << content;
        return p;
    }
};

const char* kBell =
    R"({"labels": ["S", "E"], "dims": [2, 2],
        "amplitudes": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]})";

TEST_F(CliTest, BornReportIsByteIdenticalAcrossRuns) {
    const auto a = run("born -n 7 -m 3");
    const auto b = run("born -n 7 -m 3");
    EXPECT_EQ(a.exit_code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.out.empty());
}

TEST_F(CliTest, BornMatchesTheLibraryExactly) {
    const auto r = run("born -n 7 -m 3");
    ASSERT_EQ(r.exit_code, 0);
    const Json report = Json::parse(r.out);
    const auto lib = envar::born_probabilities(envar::CommensurateInput{7, 3});
    EXPECT_EQ(report["outputs"]["p0"]["num"], envar::num_string(lib.p0));
    EXPECT_EQ(report["outputs"]["p0"]["den"], envar::den_string(lib.p0));
    EXPECT_EQ(report["outputs"]["p1"]["num"], envar::num_string(lib.p1));
    EXPECT_EQ(report["command"], "born");
    EXPECT_EQ(report["provenance"]["version"], ENVAR_VERSION);
}

TEST_F(CliTest, BornCsvIsTheExactTable) {
    const auto r = run("born -n 7 -m 3 --format csv");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out, "outcome,num,den\n0,7,10\n1,3,10\n");
}

TEST_F(CliTest, NoAdditivityRouteReportsNoSummingStep) {
    const auto r = run("born -n 5 -m 3 --no-additivity");
    ASSERT_EQ(r.exit_code, 0);
    const Json report = Json::parse(r.out);
    EXPECT_EQ(report["outputs"]["p0"]["num"], "5");
    EXPECT_EQ(report["outputs"]["p0"]["den"], "8");
    for (const auto& step : report["outputs"]["derivation"])
        EXPECT_NE(step["kind"], "additivity");
}

TEST_F(CliTest, SchmidtReadsStateFiles) {
    const auto p = write("bell.json", kBell);
    const auto r = run("schmidt --state " + p.string() + " --cut S");
    ASSERT_EQ(r.exit_code, 0);
    const Json report = Json::parse(r.out);
    EXPECT_EQ(report["outputs"]["rank"], 2);
    EXPECT_NEAR(report["outputs"]["coefficients"][0].get<double>(), 0.7071067811865476, 1e-12);
}

TEST_F(CliTest, EnvarianceVerdictsComeWithCounters) {
    const auto p = write("bell.json", kBell);
    const auto r = run("envariance --state " + p.string() + " --swap 0,1 --on S");
    ASSERT_EQ(r.exit_code, 0);
    const Json report = Json::parse(r.out);
    EXPECT_TRUE(report["outputs"]["envariant"].get<bool>());
    EXPECT_FALSE(report["outputs"]["counter"].is_null());
    EXPECT_EQ(report["outputs"]["counter"]["targets"][0], "E");
}

TEST_F(CliTest, EnsembleTableMatchesTheExactDistribution) {
    const auto r = run("ensemble -M 4 --alpha-sq 1/2 --format csv");
    ASSERT_EQ(r.exit_code, 0);
    const auto dist = envar::count_distribution(4, envar::BigRational(1, 2));
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "m,multiplicity,gamma_abs,p");
    for (int m = 0; m <= 4; ++m) {
        ASSERT_TRUE(static_cast<bool>(std::getline(lines, line)));
        const auto last_comma = line.rfind(',');
        EXPECT_EQ(line.substr(last_comma + 1),
                  envar::num_string(dist.probabilities[static_cast<std::size_t>(m)]) + "/" +
                      envar::den_string(dist.probabilities[static_cast<std::size_t>(m)]));
    }
}

TEST_F(CliTest, EnsembleDualReportIsDeterministic) {
    const auto a = run("ensemble -M 3 --alpha-sq 1/2 --dual");
    const auto b = run("ensemble -M 3 --alpha-sq 1/2 --dual");
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(a.out, b.out);
    const Json report = Json::parse(a.out);
    EXPECT_EQ(report["outputs"]["dual"]["cut_systems"].size(), 8u);
    EXPECT_EQ(report["outputs"]["dual"]["cut_counter"].size(), 4u);
}

TEST_F(CliTest, MaverickGoldenThroughTheCli) {
    const auto r = run("maverick -M 10 --epsilon 1/4");
    ASSERT_EQ(r.exit_code, 0);
    const Json report = Json::parse(r.out);
    EXPECT_EQ(report["outputs"]["fraction"]["num"], "7");
    EXPECT_EQ(report["outputs"]["fraction"]["den"], "64");
}

TEST_F(CliTest, DedekindPrettyShowsTheSandwich) {
    const auto r = run("dedekind --target 1/3 --denominator 100 --format pretty");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("33/100"), std::string::npos);
    EXPECT_NE(r.out.find("17/50"), std::string::npos);
}

TEST_F(CliTest, MissingInputsExitTwo) {
    EXPECT_EQ(run("schmidt --cut S").exit_code, 2);
    EXPECT_EQ(run("nonsense").exit_code, 2);
    EXPECT_EQ(run("schmidt --state /does/not/exist.json --cut S").exit_code, 2);
}

TEST_F(CliTest, MalformedJsonExitsTwoWithNoPartialOutput) {
    const auto p = write("broken.json", R"({"labels": ["S"], "dims": [2], "amplitudes": [[1,)");
    const auto r = run("schmidt --state " + p.string() + " --cut S");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(last_stderr().find("error"), std::string::npos);
}

TEST_F(CliTest, DomainLimitsExitThree) {
    EXPECT_EQ(run("finegrain -n 5000 -m 5000").exit_code, 3);
    const auto r = run("ensemble -M 20 --explicit");
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(last_stderr().find("formula"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, SettingsResolveFlagOverEnvOverConfig) {
    const auto conf = write("settings.conf", "format=pretty\n");
    const std::string with_config = "--config " + conf.string();

    const auto from_config = run("maverick -M 1 --epsilon 2/5 " + with_config);
    EXPECT_EQ(from_config.out.rfind("fraction", 0), 0u);  // pretty text

    const auto from_env =
        run("maverick -M 1 --epsilon 2/5 " + with_config, "ENVAR_FORMAT=csv");
    EXPECT_EQ(from_env.out.rfind("M,epsilon", 0), 0u);  // csv header

    const auto from_flag =
        run("maverick -M 1 --epsilon 2/5 --format json " + with_config, "ENVAR_FORMAT=csv");
    EXPECT_EQ(from_flag.out.rfind("{", 0), 0u);  // json report

    const auto env_config =
        run("maverick -M 1 --epsilon 2/5", "ENVAR_CONFIG=" + conf.string());
    EXPECT_EQ(env_config.out.rfind("fraction", 0), 0u);

    EXPECT_EQ(run("maverick -M 1 --epsilon 2/5", "ENVAR_FORMAT=bogus").exit_code, 2);
}

TEST_F(CliTest, ToleranceSettingChangesTheConfigHash) {
    const auto loose = run("born -n 1 -m 1 --tol 1e-6");
    const auto strict = run("born -n 1 -m 1");
    ASSERT_EQ(loose.exit_code, 0);
    const Json a = Json::parse(loose.out);
    const Json b = Json::parse(strict.out);
    EXPECT_NE(a["provenance"]["config_hash"], b["provenance"]["config_hash"]);
    EXPECT_EQ(a["outputs"], b["outputs"]);
}

}  // namespace
