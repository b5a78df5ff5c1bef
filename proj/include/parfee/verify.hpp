#pragma once

// Numerical verification suite run by `parfee verify`: every check compares
// the closed-form model against an independent route (max rule, bisection
// residual, finite differences, budget identity).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "parfee/competition.hpp"
#include "parfee/model.hpp"
#include "parfee/numerics.hpp"
#include "parfee/scenario.hpp"

namespace parfee {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool all_pass() const noexcept {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
};

/// Relative tolerance of the stabilized-schedule profit check.
inline constexpr double kStabilizedProfitRelTol = 1e-6;
/// Relative tolerance of the budget identity.
inline constexpr double kBudgetRelTol = 1e-9;

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

/// Points whose FD stencil would leave the domain.
inline Interval lower_boundary_zone(double domain_min) noexcept {
    return Interval{-std::numeric_limits<double>::infinity(), domain_min * (1.0 + 2e-6) + 2e-7};
}

inline bool in_any(double x, const std::vector<Interval>& zones) {
    return std::any_of(zones.begin(), zones.end(), [x](const Interval& z) { return z.contains(x); });
}

inline CheckResult check_max_rule(const TAPublisher& pub, const Grid& grid) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double n = grid[i];
        const FeeDecomposition d = par_fee(n, pub);
        const double p = pub.publish().value(n);
        const double r = pub.read().value(n);
        const bool ok = d.fee == std::max(p, r) && (d.alpha == 1) == (p >= r) &&
                        d.fee == compose_fee(d.alpha, d.publish_part, d.read_part);
        if (!ok) ++bad;
    }
    return {"max-rule", bad == 0, std::to_string(grid.size()) + " points, " + std::to_string(bad) + " mismatches"};
}

inline CheckResult check_threshold(const TAPublisher& pub, const Grid& grid, double root_tol,
                                   std::optional<RegimeThreshold>& found) {
    try {
        found = threshold(pub, grid.lo(), grid.hi(), root_tol);
    } catch (const NoRootError& e) {
        return {"threshold", true, e.what()};
    } catch (const Error& e) {
        return {"threshold", false, e.what()};
    }
    // The regime must switch exactly once along the grid, between the points bracketing N~.
    std::size_t switches = 0;
    bool located = false;
    int prev = optimal_alpha(grid[0], pub);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const int cur = optimal_alpha(grid[i], pub);
        if (cur != prev) {
            ++switches;
            located = grid[i - 1] <= found->n_tilde && found->n_tilde <= grid[i];
        }
        prev = cur;
    }
    const bool pass = std::abs(found->residual) <= root_tol && switches == 1 && located;
    return {"threshold", pass,
            "N_tilde = " + fmt(found->n_tilde) + ", residual = " + fmt(found->residual) +
                ", grid switches = " + std::to_string(switches)};
}

inline CheckResult report_check(const std::string& name, const DerivativeReport& r) {
    std::string detail = "max |analytic - fd| = " + fmt(r.max_abs_error) + " over " +
                         std::to_string(r.records.size()) + " points (tol " + fmt(r.tolerance) + ", " +
                         std::to_string(r.excluded_points.size()) + " excluded";
    if (!r.failed_points.empty()) detail += ", " + std::to_string(r.failed_points.size()) + " failed";
    detail += ")";
    return {name, r.pass && !r.vacuous(), detail};
}

inline CheckResult check_dampening(const TAPublisher& pub, const Grid& grid, const std::vector<Interval>& zones) {
    std::size_t checked = 0;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double n = grid[i];
        if (!(n > 0.0) || in_any(n, zones)) continue;
        const FeeDecomposition d = par_fee(n, pub);
        const MarginalProfit m = marginal_profit(n, pub);
        const double extra = m.total - (d.fee - pub.marginal_cost());
        bool ok = true;
        if (d.alpha == 1) {
            const double expected = n * pub.publish().derivative(n);
            ok = std::abs(extra - expected) <= 1e-12 * std::max(1.0, std::abs(m.total)) &&
                 (pub.publish().slope_sign() == Sign::positive ? expected > 0.0 : expected >= 0.0);
        } else if (pub.read().is_flat()) {
            ok = m.total == d.read_part - pub.marginal_cost();
        } else {
            const double expected = n * pub.read().derivative(n);
            ok = std::abs(extra - expected) <= 1e-12 * std::max(1.0, std::abs(m.total)) && expected <= 0.0;
        }
        ++checked;
        if (!ok) ++bad;
    }
    return {"marginal-profit-regimes", bad == 0 && checked > 0,
            std::to_string(checked) + " points, " + std::to_string(bad) + " violations"};
}

inline CheckResult check_stabilized(const TAPublisher& pub, const Grid& grid, Interval window) {
    try {
        const auto sched = StabilizedFeeSchedule::anchored_at_upper(pub, window.lo, window.hi);
        const double target = sched.target_profit();
        double worst = 0.0;
        auto probe = [&](double n) {
            worst = std::max(worst, std::abs(sched.profit(n) - target) / std::max(1.0, std::abs(target)));
        };
        probe(window.lo);
        probe(window.hi);
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (window.contains(grid[i])) probe(grid[i]);
        return {"stabilized-schedule", worst <= kStabilizedProfitRelTol,
                "target profit " + fmt(target) + ", max relative deviation " + fmt(worst)};
    } catch (const Error& e) {
        return {"stabilized-schedule", false, e.what()};
    }
}

inline CheckResult check_contracted_fee(const TAPublisher& pub, double volume, double expected) {
    try {
        const double fee = par_fee(volume, pub).fee;
        return {"contracted-fee", fee == expected,
                "fee at N = " + fmt(volume) + " is " + fmt(fee) + " (expected " + fmt(expected) + ")"};
    } catch (const Error& e) {
        return {"contracted-fee", false, e.what()};
    }
}

inline void check_duopoly(const Scenario& scenario, const Grid& shift_grid, double identity_tol,
                          std::vector<CheckResult>& out) {
    const DuopolyScenario scn = scenario.duopoly();
    const auto table = shift_sweep(scn, shift_grid, scenario.classify_options());

    std::size_t errors = 0, budget_bad = 0, conservation_bad = 0;
    std::size_t classified = 0, identity_bad = 0, sign_bad = 0;
    double worst_budget = 0.0, worst_identity = 0.0;
    for (const auto& row : table) {
        if (!row.ok()) {
            ++errors;
            continue;
        }
        const ShiftRecord& r = *row.value;
        worst_budget = std::max(worst_budget, std::abs(r.budget_residual));
        if (!(std::abs(r.budget_residual) <= kBudgetRelTol)) ++budget_bad;
        if (r.n_ta + r.n_oa != scn.n_total()) ++conservation_bad;
        if (!r.prop3) continue;
        ++classified;
        worst_identity = std::max(worst_identity, std::abs(r.prop3->parts.residual));
        if (!(std::abs(r.prop3->parts.residual) <= identity_tol)) ++identity_bad;
        bool sign_ok = r.prop3->sign == expected_sign(r.prop3->which);
        if (r.prop3->which == Prop3Case::alpha0_fixed_rho) sign_ok = sign_ok && r.prop3->within_fee_gap;
        if (!sign_ok) ++sign_bad;
    }
    const std::string rows = std::to_string(table.size()) + " shifts";
    out.push_back({"budget-identity", errors == 0 && budget_bad == 0,
                   rows + ", max relative residual " + fmt(worst_budget)});
    out.push_back({"publication-conservation", errors == 0 && conservation_bad == 0,
                   rows + ", " + std::to_string(conservation_bad) + " violations"});
    out.push_back({"budget-shift-identity", classified > 0 && identity_bad == 0,
                   std::to_string(classified) + " interior shifts, max |residual| " + fmt(worst_identity) +
                       " (tol " + fmt(identity_tol) + ")"});
    out.push_back({"oa-fee-response-sign", classified > 0 && sign_bad == 0,
                   std::to_string(classified) + " shifts classified, " + std::to_string(sign_bad) + " mismatches"});
}

} // namespace detail

/// Runs every applicable check on `grid` (N) and, for duopoly scenarios, on `shift_grid`.
inline VerificationReport verify_scenario(const Scenario& scenario, const Grid& grid, const Tolerances& tol,
                                          std::optional<Grid> shift_grid = std::nullopt) {
    VerificationReport rep;
    const TAPublisher& pub = scenario.ta;

    rep.checks.push_back(detail::check_max_rule(pub, grid));

    std::optional<RegimeThreshold> found;
    rep.checks.push_back(detail::check_threshold(pub, grid, tol.root_tol, found));

    std::vector<Interval> zones{detail::lower_boundary_zone(pub.domain_min())};
    if (found) zones.push_back(kink_exclusion(found->n_tilde));

    rep.checks.push_back(detail::report_check(
        "fee-derivative",
        check_derivative([&pub](double n) { return par_fee(n, pub).fee; },
                         [&pub](double n) { return fee_derivative(n, pub).value(); }, grid, tol.deriv_tol, zones)));
    rep.checks.push_back(detail::report_check(
        "marginal-profit",
        check_derivative([&pub](double n) { return profit(n, pub); },
                         [&pub](double n) { return marginal_profit(n, pub).total; }, grid, tol.deriv_tol, zones)));
    rep.checks.push_back(detail::check_dampening(pub, grid, zones));

    if (scenario.stabilize) rep.checks.push_back(detail::check_stabilized(pub, grid, *scenario.stabilize));
    if (scenario.contracted_volume && scenario.contracted_fee)
        rep.checks.push_back(detail::check_contracted_fee(pub, *scenario.contracted_volume, *scenario.contracted_fee));

    if (scenario.has_duopoly()) {
        try {
            detail::check_duopoly(scenario, shift_grid.value_or(scenario.shift_grid()), tol.identity_tol, rep.checks);
        } catch (const Error& e) {
            rep.checks.push_back({"duopoly", false, e.what()});
        }
    }
    return rep;
}

inline VerificationReport verify_scenario(const Scenario& scenario) {
    return verify_scenario(scenario, scenario.sweep, scenario.tolerances);
}

} // namespace parfee
