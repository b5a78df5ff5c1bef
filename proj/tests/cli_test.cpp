#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "parfee/cli.hpp"
#include "test_support.hpp"

using parfee::testing::scenario_path;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = parfee::cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() /
                ("parfee_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string write(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

std::string baseline(const std::string& read_a, const std::string& gamma = "0.5", const std::string& extra = "") {
    return "[ta]\npublish.family = power\npublish.a = 0\npublish.b = 10\npublish.gamma = " + gamma +
           "\nread.family = constant\nread.a = " + read_a +
           "\nmarginal_cost = 20\nfixed_cost = 1000\n[sweep]\nlo = 1\nhi = 1000\nsteps = 1000\n" + extra;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST(Cli, ThresholdOnBaseline) {
    const auto r = run({"threshold", "--scenario", scenario_path("fig1")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("N_tilde = 25.000000\n", 0), 0u) << r.out;
}

TEST(Cli, ThresholdWithoutSwitch) {
    TempDir dir;
    const auto r = run({"threshold", "--scenario", dir.write("s.ini", baseline("0"))});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "no regime switch in [1,1000]; alpha = 1 throughout\n");
}

TEST(Cli, VerifyPassesOnShippedScenario) {
    const auto r = run({"verify", "--scenario", scenario_path("fig2")});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("checks passed"), std::string::npos);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(Cli, ZeroDerivativeToleranceFailsVerification) {
    TempDir dir;
    const auto path = dir.write("s.ini", baseline("50", "0.5", "[tolerances]\nderiv_tol = 0\n"));
    const auto r = run({"verify", "--scenario", path});
    EXPECT_EQ(r.code, 1) << r.out << r.err;
    EXPECT_NE(r.out.find("FAIL fee-derivative"), std::string::npos) << r.out;
    EXPECT_EQ(run({"verify", "--scenario", scenario_path("fig1"), "--tol", "0"}).code, 1);
}

TEST(Cli, ConvexPublishCurveIsAConfigError) {
    TempDir dir;
    const auto r = run({"fee-curve", "--scenario", dir.write("s.ini", baseline("50", "1.5"))});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("ta.publish: publish curve not concave"), std::string::npos) << r.err;
}

TEST(Cli, DuopolyWithoutBudgetIsAConfigError) {
    TempDir dir;
    const std::string oa = "[oa]\npublish.family = power\npublish.a = 0\npublish.b = 10\npublish.gamma = 0.5\n"
                           "[market]\nn_total = 500\n";
    const auto r = run({"duopoly", "--scenario", dir.write("s.ini", baseline("50", "0.5", oa))});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("budget required"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrorsAreConfigErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"threshold"}).code, 2);
    EXPECT_EQ(run({"nonsense", "--scenario", scenario_path("fig1")}).code, 2);
    EXPECT_EQ(run({"fee-curve", "--scenario", scenario_path("fig1"), "--grid", "5:1:10"}).code, 2);
    EXPECT_EQ(run({"fee-curve", "--scenario", scenario_path("fig1"), "--grid", "1:2"}).code, 2);
}

TEST(Cli, IoErrors) {
    EXPECT_EQ(run({"fee-curve", "--scenario", "/nonexistent/s.ini"}).code, 3);
    EXPECT_EQ(run({"fee-curve", "--scenario", scenario_path("fig1"), "--out", "/nonexistent/dir/out.csv"}).code, 3);
}

TEST(Cli, OutFileMatchesStdout) {
    TempDir dir;
    const auto to_stdout = run({"profit-curve", "--scenario", scenario_path("fig3")});
    ASSERT_EQ(to_stdout.code, 0);
    const auto out = dir.file("p.csv");
    ASSERT_EQ(run({"profit-curve", "--scenario", scenario_path("fig3"), "--out", out}).code, 0);
    std::ifstream f(out);
    std::stringstream buf;
    buf << f.rdbuf();
    EXPECT_EQ(buf.str(), to_stdout.out);
}

TEST(Cli, FeeCurveFlatThenIncreasing) {
    const auto r = run({"fee-curve", "--scenario", scenario_path("fig1")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 251u);
    ASSERT_EQ(rows[0][4], "fee");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double n = std::stod(rows[i][0]);
        const double fee = std::stod(rows[i][4]);
        if (n < 25.0) {
            EXPECT_EQ(fee, 50.0) << n;
            EXPECT_EQ(rows[i][3], "0");
        } else {
            EXPECT_EQ(rows[i][3], "1");
            EXPECT_DOUBLE_EQ(fee, 10.0 * std::sqrt(n));
            if (i > 1 && std::stod(rows[i - 1][0]) >= 25.0) {
                EXPECT_GT(fee, std::stod(rows[i - 1][4]));
            }
        }
    }
}

TEST(Cli, HyperbolicFeeCurveHasItsMinimumBesideTheSwitch) {
    const auto r = run({"fee-curve", "--scenario", scenario_path("fig2")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    std::size_t arg = 1;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (std::stod(rows[i][4]) < std::stod(rows[arg][4])) arg = i;
    const double lo = std::stod(rows[arg - 1][0]);
    const double hi = std::stod(rows[arg + 1][0]);
    EXPECT_LT(lo, parfee::testing::kHyperbolicSwitch);
    EXPECT_GT(hi, parfee::testing::kHyperbolicSwitch);
}

TEST(Cli, ProfitCurveStartsAtMinusFixedCost) {
    const auto r = run({"profit-curve", "--scenario", scenario_path("fig3")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows[0].size(), 11u);
    EXPECT_EQ(rows[0][9], "stabilized_fee");
    EXPECT_EQ(rows[1][0], "0");
    EXPECT_EQ(rows[1][5], "-50000");
    EXPECT_EQ(rows[1][7], "nan");
}

TEST(Cli, DuopolyCsv) {
    const auto r = run({"duopoly", "--scenario", scenario_path("prop3_convex_rho")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 92u);
    EXPECT_EQ(rows[0].back(), "infeasible_flag");
    for (std::size_t i = 2; i + 1 < rows.size(); ++i) {
        EXPECT_EQ(rows[i][9], "alpha0_convex_rho");
        EXPECT_EQ(rows[i][10], "negative") << rows[i][0];
        EXPECT_EQ(rows[i][11], "0");
    }
}

TEST(Cli, GridOverride) {
    const auto r = run({"fee-curve", "--scenario", scenario_path("fig1"), "--grid", "10:40:4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[1][0], "10");
    EXPECT_EQ(rows[4][0], "40");
}
