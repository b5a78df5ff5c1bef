#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "parfee/errors.hpp"
#include "parfee/scenario.hpp"
#include "parfee/tables.hpp"
#include "test_support.hpp"

using namespace parfee;

namespace {

const std::string kBase = R"(name = base
[ta]
publish.family = power
publish.a = 0
publish.b = 10
publish.gamma = 0.5
read.family = constant
read.a = 50
marginal_cost = 20
fixed_cost = 1000
[sweep]
lo = 1
hi = 250
steps = 250
)";

std::string config_message(const std::string& text) {
    try {
        parse_scenario_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "<no error>";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    if (pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
}

} // namespace

TEST(ScenarioParse, BaseScenario) {
    const Scenario s = parse_scenario_text(kBase);
    EXPECT_EQ(s.name, "base");
    EXPECT_EQ(s.ta.publish().family(), CurveFamily::power);
    EXPECT_EQ(s.ta.read().value(1e6), 50.0);
    EXPECT_EQ(s.ta.marginal_cost(), 20.0);
    EXPECT_EQ(s.ta.fixed_cost(), 1000.0);
    EXPECT_EQ(s.sweep.size(), 250u);
    EXPECT_FALSE(s.has_duopoly());
    EXPECT_EQ(s.tolerances.root_tol, 1e-10);
    EXPECT_EQ(s.tolerances.deriv_tol, 1e-4);
}

TEST(ScenarioParse, CommentsAndWhitespace) {
    const Scenario s = parse_scenario_text("# leading comment\n\n" + replace(kBase, "lo = 1", "  lo   =   1   # inline"));
    EXPECT_EQ(s.sweep.lo(), 1.0);
}

TEST(ScenarioParse, AllShippedScenariosLoad) {
    for (const char* name : {"fig1", "fig2", "fig3", "prop3_alpha1", "prop3_fixed_rho", "prop3_convex_rho",
                             "deal_anchor"}) {
        SCOPED_TRACE(name);
        EXPECT_NO_THROW(parse_scenario_file(parfee::testing::scenario_path(name)));
    }
}

TEST(ScenarioParse, ConvexPublishCurveNamesTheKey) {
    EXPECT_EQ(config_message(replace(kBase, "publish.gamma = 0.5", "publish.gamma = 1.5")),
              "ta.publish: publish curve not concave");
}

TEST(ScenarioParse, IncreasingReadCurveRejected) {
    EXPECT_EQ(config_message(replace(kBase, "read.family = constant\nread.a = 50",
                                     "read.family = affine\nread.a = 50\nread.b = 1")),
              "ta.read: read curve not decreasing");
}

TEST(ScenarioParse, UnknownKey) {
    const std::string msg = config_message(kBase + "bogus = 3\n");
    EXPECT_NE(msg.find("sweep.bogus"), std::string::npos) << msg;
    EXPECT_NE(msg.find("unknown key"), std::string::npos) << msg;
}

TEST(ScenarioParse, UnknownSectionAndDuplicates) {
    EXPECT_NE(config_message(kBase + "[nope]\nx = 1\n").find("nope"), std::string::npos);
    EXPECT_NE(config_message(kBase + "lo = 2\n").find("sweep.lo"), std::string::npos);
}

TEST(ScenarioParse, MissingRequiredKey) {
    EXPECT_EQ(config_message(replace(kBase, "marginal_cost = 20\n", "")).rfind("ta.marginal_cost", 0), 0u);
    EXPECT_EQ(config_message(replace(kBase, "read.family = constant\n", "")).rfind("ta.read.family", 0), 0u);
}

TEST(ScenarioParse, BadNumbers) {
    EXPECT_EQ(config_message(replace(kBase, "fixed_cost = 1000", "fixed_cost = lots")).rfind("ta.fixed_cost", 0), 0u);
    EXPECT_EQ(config_message(replace(kBase, "fixed_cost = 1000", "fixed_cost = -1")).rfind("ta.fixed_cost", 0), 0u);
    EXPECT_EQ(config_message(replace(kBase, "steps = 250", "steps = 1")).rfind("sweep", 0), 0u);
}

TEST(ScenarioParse, DuopolyNeedsABudget) {
    const std::string oa = "[oa]\npublish.family = power\npublish.a = 0\npublish.b = 10\npublish.gamma = 0.5\n"
                           "[market]\nn_total = 200\n";
    const Scenario s = parse_scenario_text(kBase + oa);
    EXPECT_FALSE(s.has_duopoly());
    try {
        s.duopoly();
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_STREQ(e.what(), "market.budget: budget required");
    }
}

TEST(ScenarioParse, DuopolyShapeMismatch) {
    const std::string oa = "[oa]\npublish.family = power\npublish.a = 0\npublish.b = 9\npublish.gamma = 0.5\n"
                           "[market]\nbudget = 1e5\nn_total = 200\n";
    EXPECT_EQ(config_message(kBase + oa).rfind("oa.publish:", 0), 0u);
}

TEST(ScenarioParse, ToleranceOverrides) {
    const Scenario s = parse_scenario_text(kBase + "[tolerances]\nroot_tol = 1e-12\nderiv_tol = 0\n");
    EXPECT_EQ(s.tolerances.root_tol, 1e-12);
    EXPECT_EQ(s.tolerances.deriv_tol, 0.0);
    EXPECT_EQ(config_message(kBase + "[tolerances]\nroot_tol = 0\n").rfind("tolerances.root_tol", 0), 0u);
}

TEST(ScenarioParse, UnreadableFileIsAnIoError) {
    EXPECT_THROW(parse_scenario_file("/nonexistent/dir/x.ini"), IoError);
}

TEST(ScenarioParse, DefaultShiftGrid) {
    const std::string oa = "[oa]\npublish.family = power\npublish.a = 0\npublish.b = 10\npublish.gamma = 0.5\n"
                           "[market]\nbudget = 1e5\nn_total = 200\n";
    const Grid g = parse_scenario_text(kBase + oa).shift_grid();
    EXPECT_EQ(g.size(), 99u);
    EXPECT_EQ(g.lo(), 2.0);
    EXPECT_EQ(g.hi(), 198.0);
}

TEST(CsvOutput, ByteIdenticalAcrossRuns) {
    const Scenario s = parse_scenario_file(parfee::testing::scenario_path("fig3"));
    const auto sched = StabilizedFeeSchedule::anchored_at_upper(s.ta, s.stabilize->lo, s.stabilize->hi);
    std::ostringstream a, b;
    write_curve_csv(a, curve_sweep(s.ta, s.sweep), &sched);
    write_curve_csv(b, curve_sweep(s.ta, s.sweep), &sched);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().find('\r'), std::string::npos);
}

TEST(CsvOutput, NumberFormatting) {
    EXPECT_EQ(csv::format_number(0.1), "0.1");
    EXPECT_EQ(csv::format_number(25.0), "25");
    EXPECT_EQ(csv::format_number(-0.0), "0");
    EXPECT_EQ(csv::format_number(std::nan("")), "nan");
    EXPECT_EQ(std::stod(csv::format_number(2088.289073753278)), 2088.289073753278);
}

TEST(CsvOutput, FeeCurveColumns) {
    const Scenario s = parse_scenario_text(kBase);
    std::ostringstream out;
    write_curve_csv(out, curve_sweep(s.ta, Grid(1.0, 100.0, 100)));
    std::istringstream in(out.str());
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    EXPECT_EQ(header, "N,pi,rho,alpha,fee,profit,fee_derivative,marginal_profit,kink_flag");
    EXPECT_EQ(first, "1,10,50,0,50,-970,0,30,0");
    std::size_t rows = 1;
    std::string line;
    bool saw_kink = false;
    while (std::getline(in, line)) {
        ++rows;
        if (line.rfind("25,", 0) == 0) {
            saw_kink = true;
            EXPECT_EQ(line, "25,50,50,1,50,-250,nan,nan,1");
        }
    }
    EXPECT_EQ(rows, 100u);
    EXPECT_TRUE(saw_kink);
}
