#pragma once

// Small numerical kit: bisection, central differences, grid sweeps and an
// analytic-vs-finite-difference derivative checker. Everything here is pure
// and deterministic; the oracles used to verify the pricing model live here
// so that they never share code paths with the closed-form derivatives.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "parfee/errors.hpp"

namespace parfee {

/// Closed interval [lo, hi].
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Uniform grid including both endpoints.
class Grid {
public:
    Grid(double lo, double hi, std::size_t steps) : lo_(lo), hi_(hi), steps_(steps) {
        if (!std::isfinite(lo) || !std::isfinite(hi)) throw ValidationError("grid bounds must be finite");
        if (!(lo < hi)) throw ValidationError("grid requires lo < hi");
        if (steps < 2) throw ValidationError("grid requires at least 2 steps");
    }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t size() const noexcept { return steps_; }

    // The last point is pinned to hi so rounding never drops the endpoint.
    double operator[](std::size_t i) const noexcept {
        if (i + 1 == steps_) return hi_;
        return lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(steps_ - 1);
    }

    std::vector<double> points() const {
        std::vector<double> out(steps_);
        for (std::size_t i = 0; i < steps_; ++i) out[i] = (*this)[i];
        return out;
    }

private:
    double lo_;
    double hi_;
    std::size_t steps_;
};

struct BisectOptions {
    double x_tol = 1e-10;  ///< stop once the bracket is this narrow
    double f_tol = 1e-10;  ///< stop once |f(x)| is this small
    int max_iter = 200;
};

/// Bisection on a sign-changing bracket.
///
/// Zero tolerances are allowed and mean "run to machine precision": the loop
/// then ends when the midpoint can no longer be separated from an endpoint,
/// so the result only depends on the signs f takes, not its magnitudes.
template <std::invocable<double> F>
double bisect(F&& f, double lo, double hi, const BisectOptions& opt) {
    if (!(opt.x_tol >= 0.0) || !(opt.f_tol >= 0.0)) throw ValidationError("bisect tolerances must be >= 0");
    if (opt.max_iter <= 0) throw ValidationError("bisect max_iter must be positive");
    if (!(lo < hi)) throw ValidationError("bisect requires lo < hi");

    double flo = f(lo);
    double fhi = f(hi);
    if (std::isnan(flo) || std::isnan(fhi)) throw BracketError("bisect: function is NaN at a bracket end");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) throw BracketError("bisect: no sign change in bracket");

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) return mid;
        const double fm = f(mid);
        if (std::isnan(fm)) throw ConvergenceError("bisect: function is NaN inside bracket");
        if (std::abs(fm) <= opt.f_tol) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= opt.x_tol) return lo + (hi - lo) / 2.0;
    }
    throw ConvergenceError("bisect: max_iter exceeded");
}

template <std::invocable<double> F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 200) {
    if (!(tol > 0.0)) throw ValidationError("bisect tolerance must be positive");
    return bisect(std::forward<F>(f), lo, hi, BisectOptions{tol, tol, max_iter});
}

/// Central difference (f(x+h) - f(x-h)) / 2h.
template <std::invocable<double> F>
double fd_derivative(F&& f, double x, double h, Interval domain = {}) {
    if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
    if (!domain.contains(x - h) || !domain.contains(x + h))
        throw DomainError("finite-difference stencil leaves the domain");
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Step used by the derivative checker at abscissa x.
inline double default_fd_step(double x) noexcept { return std::max(1e-6 * std::abs(x), 1e-7); }

template <class R>
struct SweepRow {
    double x = 0.0;
    std::optional<R> value;
    std::string error;  ///< empty when value is present

    bool ok() const noexcept { return value.has_value(); }
};

template <class R>
using SweepTable = std::vector<SweepRow<R>>;

/// Evaluates f at every grid point in ascending order. Errors are captured per
/// row so one bad point never voids the table.
template <std::invocable<double> F>
auto sweep(F&& f, const Grid& grid) -> SweepTable<std::decay_t<std::invoke_result_t<F, double>>> {
    using R = std::decay_t<std::invoke_result_t<F, double>>;
    SweepTable<R> table;
    table.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SweepRow<R> row;
        row.x = grid[i];
        try {
            row.value = f(row.x);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        table.push_back(std::move(row));
    }
    return table;
}

struct DerivativeRecord {
    double x = 0.0;
    double analytic = 0.0;
    double finite_difference = 0.0;
    double abs_error = 0.0;
};

struct DerivativeReport {
    std::vector<DerivativeRecord> records;
    std::vector<double> excluded_points;  ///< inside an exclusion interval
    std::vector<double> failed_points;    ///< f or df threw
    double max_abs_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    bool vacuous() const noexcept { return records.empty(); }
};

/// Compares df against a central difference of f on every grid point outside
/// the exclusion intervals. Never throws on evaluation failures; they are
/// reported and make the check fail.
template <std::invocable<double> F, std::invocable<double> DF>
DerivativeReport check_derivative(F&& f, DF&& df, const Grid& grid, double tol,
                                  const std::vector<Interval>& exclusions = {}) {
    if (!(tol >= 0.0)) throw ValidationError("derivative-check tolerance must be >= 0");
    DerivativeReport report;
    report.tolerance = tol;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        const bool excluded = std::any_of(exclusions.begin(), exclusions.end(),
                                          [x](const Interval& iv) { return iv.contains(x); });
        if (excluded) {
            report.excluded_points.push_back(x);
            continue;
        }
        try {
            DerivativeRecord rec;
            rec.x = x;
            rec.analytic = df(x);
            rec.finite_difference = fd_derivative(f, x, default_fd_step(x));
            rec.abs_error = std::abs(rec.analytic - rec.finite_difference);
            if (std::isnan(rec.abs_error)) {
                report.failed_points.push_back(x);
                continue;
            }
            report.max_abs_error = std::max(report.max_abs_error, rec.abs_error);
            report.records.push_back(rec);
        } catch (const std::exception&) {
            report.failed_points.push_back(x);
        }
    }
    report.pass = report.failed_points.empty() && report.max_abs_error <= tol;
    return report;
}

} // namespace parfee
