#pragma once

// Publish-and-read fee model of a publisher under a transformative agreement:
// fee composition, the corner-solution weighting rule, profit and marginal
// profit, and the volume at which the fee regime switches.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "parfee/csv.hpp"
#include "parfee/curve.hpp"
#include "parfee/errors.hpp"
#include "parfee/numerics.hpp"

namespace parfee {

/// Publisher holding a paywalled back catalogue: its per-article fee has a
/// publish part and a read part.
class TAPublisher {
public:
    /// Both curves are checked against their shape contracts on `validated_on`.
    TAPublisher(CurveSpec publish, CurveSpec read, double marginal_cost, double fixed_cost, Interval validated_on)
        : publish_(std::move(publish)), read_(std::move(read)), marginal_cost_(marginal_cost),
          fixed_cost_(fixed_cost), validated_on_(validated_on) {
        if (!(marginal_cost >= 0.0) || !std::isfinite(marginal_cost))
            throw ValidationError("marginal cost must be finite and >= 0");
        if (!(fixed_cost >= 0.0) || !std::isfinite(fixed_cost))
            throw ValidationError("fixed cost must be finite and >= 0");
        validate_curve(publish_, CurveRole::publish, validated_on_);
        validate_curve(read_, CurveRole::read, validated_on_);
    }

    const CurveSpec& publish() const noexcept { return publish_; }
    const CurveSpec& read() const noexcept { return read_; }
    double marginal_cost() const noexcept { return marginal_cost_; }
    double fixed_cost() const noexcept { return fixed_cost_; }
    Interval validated_on() const noexcept { return validated_on_; }
    double domain_min() const noexcept { return std::max(publish_.domain_min(), read_.domain_min()); }

    /// Same publisher with both fee curves multiplied by lambda; costs unchanged.
    TAPublisher scaled(double lambda) const {
        return TAPublisher(publish_.scaled(lambda), read_.scaled(lambda), marginal_cost_, fixed_cost_, validated_on_);
    }

private:
    CurveSpec publish_;
    CurveSpec read_;
    double marginal_cost_;
    double fixed_cost_;
    Interval validated_on_;
};

/// Gold open-access publisher: no back catalogue, so the fee is the publish part alone.
class OAPublisher {
public:
    OAPublisher(CurveSpec publish, double marginal_cost, double fixed_cost, Interval validated_on)
        : publish_(std::move(publish)), marginal_cost_(marginal_cost), fixed_cost_(fixed_cost) {
        if (!(marginal_cost >= 0.0) || !std::isfinite(marginal_cost))
            throw ValidationError("marginal cost must be finite and >= 0");
        if (!(fixed_cost >= 0.0) || !std::isfinite(fixed_cost))
            throw ValidationError("fixed cost must be finite and >= 0");
        validate_curve(publish_, CurveRole::publish, validated_on);
    }

    const CurveSpec& publish() const noexcept { return publish_; }
    double marginal_cost() const noexcept { return marginal_cost_; }
    double fixed_cost() const noexcept { return fixed_cost_; }
    double fee(double n) const { return publish_.value(n); }

private:
    CurveSpec publish_;
    double marginal_cost_;
    double fixed_cost_;
};

struct FeeDecomposition {
    double n = 0.0;
    int alpha = 1;  ///< 1: publish part active, 0: read part active
    double publish_part = 0.0;
    double read_part = 0.0;
    double fee = 0.0;
};

/// alpha * publish + (1 - alpha) * read for a corner weight alpha in {0, 1}.
inline double compose_fee(int alpha, double publish_part, double read_part) {
    if (alpha != 0 && alpha != 1) throw ValidationError("alpha must be 0 or 1");
    if (!(publish_part >= 0.0)) throw ValidationError("publish part must be >= 0");
    if (!(read_part >= 0.0)) throw ValidationError("read part must be >= 0");
    const double w = static_cast<double>(alpha);
    return w * publish_part + (1.0 - w) * read_part;
}

namespace detail {
inline void check_volume(double n, const TAPublisher& pub) {
    if (!(n >= pub.domain_min()) || !std::isfinite(n)) {
        std::ostringstream os;
        os << "N = " << n << " is outside the publisher domain [" << pub.domain_min() << ", inf)";
        throw DomainError(os.str());
    }
}
inline int alpha_for(double publish_part, double read_part) noexcept { return publish_part >= read_part ? 1 : 0; }
} // namespace detail

/// Corner weight maximising the fee at volume n. Ties go to the publish part.
inline int optimal_alpha(double n, const TAPublisher& pub) {
    detail::check_volume(n, pub);
    return detail::alpha_for(pub.publish().value(n), pub.read().value(n));
}

inline FeeDecomposition par_fee(double n, const TAPublisher& pub) {
    detail::check_volume(n, pub);
    FeeDecomposition d;
    d.n = n;
    d.publish_part = pub.publish().value(n);
    d.read_part = pub.read().value(n);
    d.alpha = detail::alpha_for(d.publish_part, d.read_part);
    d.fee = compose_fee(d.alpha, d.publish_part, d.read_part);
    return d;
}

/// Slope of the fee curve. Away from the regime switch left == right; at an
/// exact tie with distinct component slopes the curve has a kink and only
/// the one-sided limits exist.
struct FeeSlope {
    double n = 0.0;
    double left = 0.0;
    double right = 0.0;
    bool kink = false;

    double value() const {
        if (kink) throw KinkError("fee derivative undefined at the regime switch; use left/right limits");
        return right;
    }
};

inline FeeSlope fee_derivative(double n, const TAPublisher& pub) {
    const FeeDecomposition d = par_fee(n, pub);
    const double dp = pub.publish().derivative(n);
    const double dr = pub.read().derivative(n);
    FeeSlope s;
    s.n = n;
    if (d.publish_part == d.read_part && dp != dr) {
        // Just above the tie the component with the larger slope dominates.
        s.kink = true;
        s.left = std::min(dp, dr);
        s.right = std::max(dp, dr);
        return s;
    }
    s.left = s.right = d.alpha == 1 ? dp : dr;
    return s;
}

/// N * (fee - c) - F.
inline double profit(double n, const TAPublisher& pub) {
    const FeeDecomposition d = par_fee(n, pub);
    return n * (d.fee - pub.marginal_cost()) - pub.fixed_cost();
}

/// dProfit/dN split into the naive margin (I), the active-component fee
/// adjustment (II) and the weighting switch term (III, zero inside a regime):
/// total = I + N * (II + III).
struct MarginalProfit {
    double part_I = 0.0;
    double part_II = 0.0;
    double part_III = 0.0;
    double total = 0.0;
};

inline MarginalProfit marginal_profit(double n, const TAPublisher& pub) {
    if (!(n > 0.0)) throw DomainError("marginal profit requires N > 0");
    const FeeDecomposition d = par_fee(n, pub);
    const FeeSlope slope = fee_derivative(n, pub);
    if (slope.kink)
        throw KinkError("marginal profit undefined at the regime switch; evaluate on either side of it");
    MarginalProfit m;
    m.part_I = d.fee - pub.marginal_cost();
    m.part_II = slope.right;
    m.part_III = 0.0;
    m.total = m.part_I + n * (m.part_II + m.part_III);
    return m;
}

struct RegimeThreshold {
    double n_tilde = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double residual = 0.0;  ///< publish(n_tilde) - read(n_tilde)
    double tolerance = 0.0;
};

/// Volume at which publish and read parts cross, by bisection on their difference.
/// The bracket must contain exactly one crossing; more are not detected.
inline RegimeThreshold threshold(const TAPublisher& pub, double bracket_lo, double bracket_hi, double tol = 1e-10) {
    if (!(tol > 0.0)) throw ValidationError("threshold tolerance must be positive");
    if (!(bracket_lo < bracket_hi)) throw ValidationError("threshold bracket requires lo < hi");
    detail::check_volume(bracket_lo, pub);
    auto gap = [&pub](double n) { return pub.publish().value(n) - pub.read().value(n); };

    const double glo = gap(bracket_lo);
    const double ghi = gap(bracket_hi);
    if (!(glo * ghi < 0.0)) {
        std::ostringstream os;
        os << "no regime switch in [" << csv::format_number(bracket_lo) << "," << csv::format_number(bracket_hi)
           << "]; alpha = "
           << (glo >= 0.0 ? 1 : 0) << " throughout";
        throw NoRootError(os.str());
    }

    // Sign-only bisection down to machine precision, so the result does not
    // depend on the magnitude of the fee curves.
    RegimeThreshold t;
    t.n_tilde = bisect(gap, bracket_lo, bracket_hi, BisectOptions{0.0, 0.0, 200});
    t.bracket_lo = bracket_lo;
    t.bracket_hi = bracket_hi;
    t.residual = gap(t.n_tilde);
    t.tolerance = tol;
    if (std::abs(t.residual) > tol) {
        std::ostringstream os;
        os << "threshold residual " << t.residual << " exceeds tolerance " << tol;
        throw ConvergenceError(os.str());
    }
    return t;
}

/// Neighbourhood of the regime switch excluded from finite-difference
/// comparisons: half-width max(10 h, 1e-6 N~) with h the FD step at N~.
inline Interval kink_exclusion(double n_tilde, double h) noexcept {
    const double delta = std::max(10.0 * h, 1e-6 * std::abs(n_tilde));
    return Interval{n_tilde - delta, n_tilde + delta};
}

inline Interval kink_exclusion(double n_tilde) noexcept { return kink_exclusion(n_tilde, default_fd_step(n_tilde)); }

/// Fee schedule that holds profit at a fixed target on [n_lo, n_hi]:
/// fee(N) = c + (target + F) / N there, the max-rule fee elsewhere.
class StabilizedFeeSchedule {
public:
    /// Target profit is the max-rule profit at n_hi.
    static StabilizedFeeSchedule anchored_at_upper(const TAPublisher& pub, double n_lo, double n_hi) {
        return StabilizedFeeSchedule(pub, n_lo, n_hi, parfee::profit(n_hi, pub));
    }

    StabilizedFeeSchedule(TAPublisher pub, double n_lo, double n_hi, double target_profit)
        : pub_(std::move(pub)), n_lo_(n_lo), n_hi_(n_hi), target_(target_profit) {
        if (!(n_lo > 0.0)) throw ValidationError("stabilized schedule requires n_lo > 0 (fee divides by N)");
        if (!(n_lo <= n_hi)) throw ValidationError("stabilized schedule requires n_lo <= n_hi");
        if (!std::isfinite(target_profit)) throw ValidationError("stabilized schedule target must be finite");
    }

    double n_lo() const noexcept { return n_lo_; }
    double n_hi() const noexcept { return n_hi_; }
    double target_profit() const noexcept { return target_; }
    bool covers(double n) const noexcept { return n_lo_ <= n && n <= n_hi_; }

    double fee(double n) const {
        if (covers(n)) return pub_.marginal_cost() + (target_ + pub_.fixed_cost()) / n;
        return par_fee(n, pub_).fee;
    }

    double profit(double n) const { return n * (fee(n) - pub_.marginal_cost()) - pub_.fixed_cost(); }

private:
    TAPublisher pub_;
    double n_lo_;
    double n_hi_;
    double target_;
};

} // namespace parfee
