#pragma once

// CSV payloads behind the fee, profit and shift sweeps.

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "parfee/competition.hpp"
#include "parfee/csv.hpp"
#include "parfee/model.hpp"
#include "parfee/numerics.hpp"

namespace parfee {

struct CurvePoint {
    double n = 0.0;
    FeeDecomposition fee;
    double profit = 0.0;
    double fee_derivative = 0.0;   ///< NaN at the kink
    double marginal_profit = 0.0;  ///< NaN where undefined (kink, N = 0)
    bool kink = false;
};

inline CurvePoint curve_point(double n, const TAPublisher& pub) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    CurvePoint p;
    p.n = n;
    p.fee = par_fee(n, pub);
    p.profit = profit(n, pub);
    const FeeSlope slope = fee_derivative(n, pub);
    p.kink = slope.kink;
    p.fee_derivative = slope.kink ? nan : slope.right;
    try {
        p.marginal_profit = marginal_profit(n, pub).total;
    } catch (const Error&) {
        p.marginal_profit = nan;
    }
    return p;
}

inline SweepTable<CurvePoint> curve_sweep(const TAPublisher& pub, const Grid& grid) {
    return sweep([&pub](double n) { return curve_point(n, pub); }, grid);
}

/// Columns N, pi, rho, alpha, fee, profit, fee_derivative, marginal_profit,
/// kink_flag; with a schedule, stabilized_fee and stabilized_profit follow.
inline void write_curve_csv(std::ostream& out, const SweepTable<CurvePoint>& table,
                            const StabilizedFeeSchedule* schedule = nullptr) {
    using csv::format_flag;
    using csv::format_number;
    csv::Writer w(out);
    std::vector<std::string_view> header = {"N",   "pi",     "rho",          "alpha",          "fee",
                                            "profit", "fee_derivative", "marginal_profit", "kink_flag"};
    if (schedule) {
        header.push_back("stabilized_fee");
        header.push_back("stabilized_profit");
    }
    w.header(header);
    const std::string nan = "nan";
    for (const auto& row : table) {
        std::vector<std::string> f;
        f.push_back(format_number(row.x));
        if (row.ok()) {
            const CurvePoint& p = *row.value;
            f.push_back(format_number(p.fee.publish_part));
            f.push_back(format_number(p.fee.read_part));
            f.push_back(std::to_string(p.fee.alpha));
            f.push_back(format_number(p.fee.fee));
            f.push_back(format_number(p.profit));
            f.push_back(format_number(p.fee_derivative));
            f.push_back(format_number(p.marginal_profit));
            f.push_back(format_flag(p.kink));
        } else {
            f.insert(f.end(), 8, nan);
        }
        if (schedule) {
            try {
                f.push_back(format_number(schedule->fee(row.x)));
                f.push_back(format_number(schedule->profit(row.x)));
            } catch (const Error&) {
                f.push_back(nan);
                f.push_back(nan);
            }
        }
        w.row(f);
    }
}

/// Columns s, n_ta, n_oa, fee_ta, fee_oa, alpha_ta, revenue_ta, revenue_oa,
/// budget_residual, prop3_case, prop3_sign, infeasible_flag. prop3_sign is
/// "undefined" where the classification could not be evaluated.
inline void write_shift_csv(std::ostream& out, const SweepTable<ShiftRecord>& table) {
    using csv::format_flag;
    using csv::format_number;
    csv::Writer w(out);
    w.header({"s", "n_ta", "n_oa", "fee_ta", "fee_oa", "alpha_ta", "revenue_ta", "revenue_oa", "budget_residual",
              "prop3_case", "prop3_sign", "infeasible_flag"});
    for (const auto& row : table) {
        std::vector<std::string> f;
        f.push_back(format_number(row.x));
        if (!row.ok()) {
            f.insert(f.end(), 8, "nan");
            f.insert(f.end(), {"undefined", "undefined", "nan"});
            w.row(f);
            continue;
        }
        const ShiftRecord& r = *row.value;
        f.push_back(format_number(r.n_ta));
        f.push_back(format_number(r.n_oa));
        f.push_back(format_number(r.fee_ta));
        f.push_back(format_number(r.fee_oa));
        f.push_back(std::to_string(r.alpha_ta));
        f.push_back(format_number(r.revenue_ta));
        f.push_back(format_number(r.revenue_oa));
        f.push_back(format_number(r.budget_residual));
        f.push_back(std::string(to_string(r.prop3_case)));
        f.push_back(r.prop3 ? std::string(to_string(r.prop3->sign)) : std::string("undefined"));
        f.push_back(format_flag(r.infeasible));
        w.row(f);
    }
}

} // namespace parfee
