#include <clocale>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "plap/cli.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kData = PLAP_TEST_DATA_DIR;

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "plap");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = plap::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string f; std::getline(is, f, ',');) v.push_back(f);
    return v;
}

// Data rows of a CSV body, skipping '#' lines and the column header.
std::vector<std::vector<std::string>> rows(const std::string& s) {
    std::vector<std::vector<std::string>> r;
    bool header = false;
    for (const auto& l : lines(s)) {
        if (l.starts_with("#")) continue;
        if (!header) {
            header = true;
            continue;
        }
        r.push_back(split(l));
    }
    return r;
}

nlohmann::json config_echo(const std::string& s) {
    const auto first = lines(s).at(0);
    EXPECT_TRUE(first.starts_with("# config="));
    return nlohmann::json::parse(first.substr(9));
}

TEST(Cli, PtrigTableMatchesSinCos) {
    const Outcome r = run({"ptrig-table", "--p", "2", "--x-min", "0", "--x-max", "3.14159", "--steps", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rs = rows(r.out);
    ASSERT_EQ(rs.size(), 5u);
    for (const auto& row : rs) {
        const double x = std::stod(row[0]);
        EXPECT_NEAR(std::stod(row[1]), std::sin(x), 1e-12);
        EXPECT_NEAR(std::stod(row[2]), std::cos(x), 1e-12);
    }
}

TEST(Cli, PtrigTableRejectsP1) {
    const Outcome r = run({"ptrig-table", "--p", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, EigsFreeDefault) {
    const Outcome r = run({"eigs", "--p", "2", "--n-max", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rs = rows(r.out);
    ASSERT_EQ(rs.size(), 3u);
    for (int n = 1; n <= 3; ++n)
        EXPECT_LT(oracle::rel_err(std::stod(rs[n - 1][1]), n * n * oracle::kPi2 * oracle::kPi2), 1e-9);
}

TEST(Cli, EigsConstantShiftAtP3) {
    const Outcome r = run({"eigs", "--p", "3", "--n-max", "2", "--potential",
                       R"({"type":"constant","value":-2})"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(oracle::rel_err(std::stod(rows(r.out)[1][1]), oracle::kTwoPi3Cubed - 2.0), 1e-9);
}

TEST(Cli, SeventeenDigitsLocaleIndependent) {
    std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
    const Outcome r = run({"eigs", "--p", "2", "--n-max", "1"});
    std::setlocale(LC_NUMERIC, "C");
    ASSERT_EQ(r.code, 0);
    const std::string lam = rows(r.out)[0][1];
    EXPECT_EQ(lam, "9.8696044010893544");
    EXPECT_EQ(r.out.find('\r'), std::string::npos);
}

TEST(Cli, ConfigEchoAndPrecedence) {
    // File sets p=3, n_max=2; the flag overrides p only.
    const Outcome r = run({"eigs", "--config", kData + "/p3.json", "--p", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto cfg = config_echo(r.out);
    EXPECT_EQ(cfg["p"], 2.0);
    EXPECT_EQ(cfg["n_max"], 2);
    EXPECT_EQ(cfg["harness"]["solver"]["tolerances"]["rel_tol"], 1e-10);
    EXPECT_EQ(cfg["harness"]["solver"]["tolerances"]["abs_tol"], 1e-12);
    EXPECT_EQ(rows(r.out).size(), 2u);

    const Outcome d = run({"eigs"});
    const auto dc = config_echo(d.out);
    EXPECT_EQ(dc["p"], 2.0);
    EXPECT_EQ(dc["n_max"], 5);
}

TEST(Cli, UnknownConfigKey) {
    const Outcome r = run({"eigs", "--config", kData + "/unknown_key.json"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"eigs", "--bogus"}).code, 1);
    EXPECT_EQ(run({"eigs", "--ell", "1.5"}).code, 1);
    EXPECT_EQ(run({"eigs", "--n-max", "0"}).code, 1);
    EXPECT_EQ(run({"eigs", "--format", "xml"}).code, 1);
    EXPECT_EQ(run({"verify", "--theorem", "t9"}).code, 1);
    EXPECT_EQ(run({"eigs", "--config", kData + "/missing.json"}).code, 1);
    EXPECT_EQ(run({"verify", "--ratio-slack", "-1"}).code, 1);
}

TEST(Cli, PotentialSpecErrorNamesLocation) {
    const Outcome r = run({"eigs", "--potential", R"({"type":"piecewise_linear","knots":[[0,1],[0.5]]})"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("/knots/1"), std::string::npos) << r.err;
}

TEST(Cli, SolverFailureExit2) {
    const Outcome r = run({"eigs", "--n-max", "1", "--potential",
                       R"({"type":"scaled_tent","depth":-12,"rise":6})"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("index 1"), std::string::npos);
}

TEST(Cli, VerifyExitCodes) {
    EXPECT_EQ(run({"verify", "--theorem", "t2", "--potential", kData + "/tent.json"}).code, 0);
    const std::string well = R"({"type":"scaled_well","height":5,"dip":4})";
    EXPECT_EQ(run({"verify", "--theorem", "t2", "--potential", well}).code, 4);
    EXPECT_EQ(run({"verify", "--theorem", "r1", "--potential", well, "--n-max", "4"}).code, 0);
    EXPECT_EQ(run({"verify", "--theorem", "t1", "--potential", kData + "/tent.json"}).code, 0);
    EXPECT_EQ(run({"verify", "--theorem", "t3", "--potential", kData + "/tent.json",
                   "--n-max", "3"}).code, 0);
}

TEST(Cli, VerifyReportFormat) {
    const Outcome r = run({"verify", "--theorem", "t2", "--potential", kData + "/tent.json",
                       "--n-max", "3", "--format", "report"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["verdict"], "verified");
    EXPECT_EQ(j["theorem_id"], "T2");
    EXPECT_EQ(j["run"]["p"], 2.0);
}

TEST(Cli, SweepOverPGivesFreeRatios) {
    const Outcome r = run({"sweep", "--axis", "p", "--values", "1.5,2,3", "--n-max", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rs = rows(r.out);
    ASSERT_EQ(rs.size(), 9u);
    for (const auto& row : rs) {
        const double p = std::stod(row[1]), n = std::stod(row[2]);
        EXPECT_LT(oracle::rel_err(std::stod(row[4]), std::pow(n, p)), 1e-8);
    }
}

TEST(Cli, SweepOverEll) {
    const Outcome r = run({"sweep", "--axis", "ell", "--values", "0.5,1", "--n-max", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rs = rows(r.out);
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_LT(oracle::rel_err(std::stod(rs[0][3]), 4.0 * std::stod(rs[1][3])), 1e-9);
}

TEST(Cli, Classify) {
    const Outcome r = run({"classify", "--potential", kData + "/tent.json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("shape,single_barrier\n"), std::string::npos);
    EXPECT_NE(r.out.find("x0,0.5\n"), std::string::npos);
}

TEST(Cli, OutFile) {
    const fs::path path = fs::temp_directory_path() / "plap_cli_out.csv";
    fs::remove(path);
    const Outcome r = run({"eigs", "--n-max", "1", "--out", path.string()});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(rows(ss.str()).size(), 1u);
    fs::remove(path);
}

TEST(Cli, RandomPotentialIsSeeded) {
    const Outcome a = run({"eigs", "--potential", "random", "--seed", "7", "--n-max", "2"});
    const Outcome b = run({"eigs", "--potential", "random", "--seed", "7", "--n-max", "2"});
    ASSERT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out);
}

int shell(const std::string& cmd) {
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

TEST(CliBinary, ExitStatusesFromProcess) {
    const std::string bin = PLAP_CLI_PATH;
    const std::string quiet = " >/dev/null 2>&1";
    EXPECT_EQ(shell(bin + " eigs --n-max 2" + quiet), 0);
    EXPECT_EQ(shell(bin + " ptrig-table --p 1" + quiet), 1);
    EXPECT_EQ(shell(bin + " verify --theorem t2 --potential " + kData + "/tent.json" + quiet), 0);
    EXPECT_EQ(shell(bin + " verify --theorem t2 --potential '{\"type\":\"scaled_well\","
                          "\"height\":5,\"dip\":4}'" + quiet), 4);
}

}  // namespace
