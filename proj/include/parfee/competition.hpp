#pragma once

// Fixed library budget split between a transformative-agreement publisher and
// a gold open-access publisher. Total output is fixed, so shifting s
// publications to the OA side leaves N_TA = n_total - s; the OA fee is the
// one the remaining budget implies.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "parfee/errors.hpp"
#include "parfee/model.hpp"
#include "parfee/numerics.hpp"

namespace parfee {

class DuopolyScenario {
public:
    DuopolyScenario(double budget, double n_total, TAPublisher ta, OAPublisher oa)
        : budget_(budget), n_total_(n_total), ta_(std::move(ta)), oa_(std::move(oa)) {
        if (!(budget >= 0.0) || !std::isfinite(budget)) throw ValidationError("budget must be finite and >= 0");
        if (!(n_total > 0.0) || !std::isfinite(n_total)) throw ValidationError("total publications must be > 0");
        if (!(ta_.validated_on().hi >= n_total))
            throw ValidationError("TA publisher must be validated up to the total publication volume");
        if (!oa_.publish().same_shape(ta_.publish()))
            throw ValidationError("OA publish curve must match the TA publish curve except for its intercept");
        if (!(ta_.publish().a() >= oa_.publish().a()))
            throw ValidationError("TA publish intercept must be >= OA publish intercept");
    }

    double budget() const noexcept { return budget_; }
    double n_total() const noexcept { return n_total_; }
    const TAPublisher& ta() const noexcept { return ta_; }
    const OAPublisher& oa() const noexcept { return oa_; }

private:
    double budget_;
    double n_total_;
    TAPublisher ta_;
    OAPublisher oa_;
};

struct ImpliedOaFee {
    double fee = 0.0;
    bool infeasible = false;  ///< fee < 0: the budget cannot sustain the split
    bool exhausted = false;   ///< fee == 0: the TA publisher absorbs the whole budget
};

namespace detail {
inline void check_shift(const DuopolyScenario& scn, double s) {
    if (!(s > 0.0)) throw ValidationError("shift s must be > 0 (the OA fee divides by s)");
    if (!(s <= scn.n_total())) throw DomainError("shift s exceeds the total publication volume");
}
inline double ta_revenue(const DuopolyScenario& scn, double s) {
    const double n_ta = scn.n_total() - s;
    return par_fee(n_ta, scn.ta()).fee * n_ta;
}
} // namespace detail

/// OA fee solving budget = fee_TA * N_TA + fee_OA * s.
inline ImpliedOaFee implied_oa_fee(const DuopolyScenario& scn, double s) {
    detail::check_shift(scn, s);
    ImpliedOaFee out;
    out.fee = (scn.budget() - detail::ta_revenue(scn, s)) / s;
    out.infeasible = out.fee < 0.0;
    out.exhausted = out.fee == 0.0;
    return out;
}

/// OA publisher profit when charging the budget-implied fee.
inline double oa_profit(const DuopolyScenario& scn, double s) {
    const double fee = implied_oa_fee(scn, s).fee;
    return s * (fee - scn.oa().marginal_cost()) - scn.oa().fixed_cost();
}

/// Relative FD step for derivatives in the shift variable.
inline double default_shift_step(double s) noexcept { return 1e-5 * s; }

/// Budget-derivative terms at a shift s:
///   part_I   = d fee_OA / ds * s            (finite difference)
///   part_II  = d fee_TA / dN_TA * N_TA      (closed form)
///   part_III = fee_OA - fee_TA
/// A fixed budget forces part_I = part_II - part_III; residual measures it.
struct BudgetShiftParts {
    double part_I = 0.0;
    double part_II = 0.0;
    double part_III = 0.0;
    double residual = 0.0;
};

inline BudgetShiftParts eq9_decomposition(const DuopolyScenario& scn, double s, double h) {
    detail::check_shift(scn, s);
    if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
    if (!(s - h > 0.0) || !(s + h < scn.n_total()))
        throw DomainError("shift stencil must stay inside (0, n_total)");

    const double n_ta = scn.n_total() - s;
    const double delta = std::max(10.0 * h, 1e-6 * n_ta);
    const double below = std::max(n_ta - delta, scn.ta().domain_min());
    if (optimal_alpha(below, scn.ta()) != optimal_alpha(n_ta + delta, scn.ta())) {
        std::ostringstream os;
        os << "N_TA = " << n_ta << " is within " << delta << " of the TA regime switch";
        throw KinkError(os.str());
    }
    const FeeSlope slope = fee_derivative(n_ta, scn.ta());

    BudgetShiftParts p;
    const double fee_oa = implied_oa_fee(scn, s).fee;
    const double fee_ta = par_fee(n_ta, scn.ta()).fee;
    auto oa_fee_of = [&scn](double x) { return implied_oa_fee(scn, x).fee; };
    p.part_I = fd_derivative(oa_fee_of, s, h) * s;
    p.part_II = slope.value() * n_ta;
    p.part_III = fee_oa - fee_ta;
    p.residual = p.part_I - (p.part_II - p.part_III);
    return p;
}

inline BudgetShiftParts eq9_decomposition(const DuopolyScenario& scn, double s) {
    return eq9_decomposition(scn, s, default_shift_step(s));
}

enum class Prop3Case { alpha1, alpha0_fixed_rho, alpha0_convex_rho };
enum class Prop3Sign { positive, near_zero, negative };

inline std::string_view to_string(Prop3Case c) noexcept {
    switch (c) {
    case Prop3Case::alpha1: return "alpha1";
    case Prop3Case::alpha0_fixed_rho: return "alpha0_fixed_rho";
    case Prop3Case::alpha0_convex_rho: return "alpha0_convex_rho";
    }
    return "?";
}

inline std::string_view to_string(Prop3Sign s) noexcept {
    switch (s) {
    case Prop3Sign::positive: return "positive";
    case Prop3Sign::near_zero: return "near_zero";
    case Prop3Sign::negative: return "negative";
    }
    return "?";
}

/// Sign the OA fee response takes in each TA regime.
inline Prop3Sign expected_sign(Prop3Case c) noexcept {
    switch (c) {
    case Prop3Case::alpha1: return Prop3Sign::positive;
    case Prop3Case::alpha0_fixed_rho: return Prop3Sign::near_zero;
    case Prop3Case::alpha0_convex_rho: return Prop3Sign::negative;
    }
    return Prop3Sign::near_zero;
}

inline Prop3Case prop3_case(int alpha_ta, const CurveSpec& read) noexcept {
    if (alpha_ta == 1) return Prop3Case::alpha1;
    return read.is_flat() ? Prop3Case::alpha0_fixed_rho : Prop3Case::alpha0_convex_rho;
}

struct ClassifyOptions {
    /// Half-width of the near-zero band; defaults to |fee_OA - fee_TA| at s.
    std::optional<double> near_zero_band;
    /// Allowance for the finite-difference error carried by part_I.
    double fd_slack = 1e-3;
    /// FD step in s; defaults to default_shift_step(s).
    std::optional<double> step;
};

struct Prop3Result {
    Prop3Case which = Prop3Case::alpha1;
    Prop3Sign sign = Prop3Sign::near_zero;
    double part_I = 0.0;
    double band = 0.0;
    BudgetShiftParts parts;
    /// |part_I| <= |fee_OA - fee_TA| + fd_slack.
    bool within_fee_gap = false;
};

inline Prop3Result proposition3_classify(const DuopolyScenario& scn, double s, const ClassifyOptions& opt = {}) {
    if (!(opt.fd_slack >= 0.0)) throw ValidationError("fd_slack must be >= 0");
    const BudgetShiftParts parts = eq9_decomposition(scn, s, opt.step.value_or(default_shift_step(s)));
    Prop3Result r;
    r.parts = parts;
    r.part_I = parts.part_I;
    r.which = prop3_case(optimal_alpha(scn.n_total() - s, scn.ta()), scn.ta().read());
    r.band = opt.near_zero_band.value_or(std::abs(parts.part_III));
    if (!(r.band >= 0.0)) throw ValidationError("near-zero band must be >= 0");
    const double edge = r.band + opt.fd_slack;
    if (parts.part_I > edge) {
        r.sign = Prop3Sign::positive;
    } else if (parts.part_I < -edge) {
        r.sign = Prop3Sign::negative;
    } else {
        r.sign = Prop3Sign::near_zero;
    }
    r.within_fee_gap = std::abs(parts.part_I) <= std::abs(parts.part_III) + opt.fd_slack;
    return r;
}

struct ShiftRecord {
    double s = 0.0;
    double n_ta = 0.0;
    double n_oa = 0.0;
    double fee_ta = 0.0;
    double fee_oa = 0.0;
    int alpha_ta = 1;
    double revenue_ta = 0.0;
    double revenue_oa = 0.0;
    double d_oa_revenue = std::nan("");  ///< FD of OA revenue in s; NaN when the stencil leaves (0, n_total)
    double budget_residual = 0.0;        ///< (revenue_ta + revenue_oa - B) / B, absolute when B == 0
    Prop3Case prop3_case = Prop3Case::alpha1;
    std::optional<Prop3Result> prop3;    ///< absent at the TA kink or at the sweep edges
    std::string prop3_error;
    bool infeasible = false;
};

inline ShiftRecord shift_record(const DuopolyScenario& scn, double s, const ClassifyOptions& opt = {}) {
    const ImpliedOaFee oa = implied_oa_fee(scn, s);
    const FeeDecomposition ta = par_fee(scn.n_total() - s, scn.ta());
    ShiftRecord r;
    r.s = s;
    r.n_oa = s;
    r.n_ta = scn.n_total() - s;
    r.fee_ta = ta.fee;
    r.fee_oa = oa.fee;
    r.alpha_ta = ta.alpha;
    r.revenue_ta = ta.fee * r.n_ta;
    r.revenue_oa = oa.fee * s;
    const double gap = r.revenue_ta + r.revenue_oa - scn.budget();
    r.budget_residual = scn.budget() > 0.0 ? gap / scn.budget() : gap;
    r.infeasible = oa.infeasible;
    r.prop3_case = prop3_case(ta.alpha, scn.ta().read());

    const double h = opt.step.value_or(default_shift_step(s));
    if (s - h > 0.0 && s + h < scn.n_total()) {
        auto oa_revenue = [&scn](double x) { return scn.budget() - detail::ta_revenue(scn, x); };
        r.d_oa_revenue = fd_derivative(oa_revenue, s, h);
    }
    try {
        r.prop3 = proposition3_classify(scn, s, opt);
    } catch (const Error& e) {
        r.prop3_error = e.what();
    }
    return r;
}

/// One record per grid point in ascending s; the grid must lie in (0, n_total].
inline SweepTable<ShiftRecord> shift_sweep(const DuopolyScenario& scn, const Grid& grid,
                                           const ClassifyOptions& opt = {}) {
    if (!(grid.lo() > 0.0) || !(grid.hi() <= scn.n_total()))
        throw ValidationError("shift grid must lie inside (0, n_total]");
    return sweep([&](double s) { return shift_record(scn, s, opt); }, grid);
}

} // namespace parfee
