#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "parfee/errors.hpp"
#include "parfee/numerics.hpp"

namespace parfee {

enum class CurveFamily { power, log_affine, affine, constant, hyperbolic };

inline std::string_view to_string(CurveFamily f) noexcept {
    switch (f) {
    case CurveFamily::power: return "power";
    case CurveFamily::log_affine: return "log-affine";
    case CurveFamily::affine: return "affine";
    case CurveFamily::constant: return "constant";
    case CurveFamily::hyperbolic: return "hyperbolic";
    }
    return "?";
}

inline std::optional<CurveFamily> parse_family(std::string_view name) noexcept {
    for (auto f : {CurveFamily::power, CurveFamily::log_affine, CurveFamily::affine, CurveFamily::constant,
                   CurveFamily::hyperbolic}) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

/// Sign of a derivative over the whole open domain, as far as the closed form tells.
enum class Sign { negative, zero, positive };

/// A fee component as a function of the (continuous) publication volume N.
///
///   power       scale * (a + b * N^gamma)     b > 0, gamma > 0
///   log-affine  scale * (a + b * ln(1 + N))   b > 0
///   affine      scale * (a + b * N)
///   constant    scale * a
///   hyperbolic  scale * (a + b / (N + s))     b > 0, s > 0
///
/// `scale` is an overall positive multiplier applied last, so that a scaled
/// curve evaluates to exactly scale times the unscaled value.
class CurveSpec {
public:
    static CurveSpec power(double a, double b, double gamma, double domain_min = 0.0) {
        if (!(b > 0.0)) throw ValidationError("power curve requires b > 0");
        if (!(gamma > 0.0)) throw ValidationError("power curve requires gamma > 0");
        return CurveSpec(CurveFamily::power, a, b, gamma, domain_min);
    }
    static CurveSpec log_affine(double a, double b, double domain_min = 0.0) {
        if (!(b > 0.0)) throw ValidationError("log-affine curve requires b > 0");
        return CurveSpec(CurveFamily::log_affine, a, b, 0.0, domain_min);
    }
    static CurveSpec affine(double a, double b, double domain_min = 0.0) {
        return CurveSpec(CurveFamily::affine, a, b, 0.0, domain_min);
    }
    static CurveSpec constant(double a, double domain_min = 0.0) {
        return CurveSpec(CurveFamily::constant, a, 0.0, 0.0, domain_min);
    }
    static CurveSpec hyperbolic(double a, double b, double shift, double domain_min = 0.0) {
        if (!(b > 0.0)) throw ValidationError("hyperbolic curve requires b > 0");
        if (!(shift > 0.0)) throw ValidationError("hyperbolic curve requires s > 0");
        return CurveSpec(CurveFamily::hyperbolic, a, b, shift, domain_min);
    }

    CurveFamily family() const noexcept { return family_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double gamma() const noexcept { return shape_; }
    double shift() const noexcept { return shape_; }
    double scale() const noexcept { return scale_; }
    double domain_min() const noexcept { return domain_min_; }

    /// Coefficients in family order: power {a, b, gamma}, log-affine/affine
    /// {a, b}, constant {a}, hyperbolic {a, b, s}.
    std::vector<double> params() const {
        switch (family_) {
        case CurveFamily::power: return {a_, b_, shape_};
        case CurveFamily::log_affine:
        case CurveFamily::affine: return {a_, b_};
        case CurveFamily::constant: return {a_};
        case CurveFamily::hyperbolic: return {a_, b_, shape_};
        }
        return {};
    }

    CurveSpec scaled(double lambda) const {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("curve scale factor must be positive");
        CurveSpec out = *this;
        out.scale_ = scale_ * lambda;
        return out;
    }

    CurveSpec with_intercept(double a) const {
        CurveSpec out = *this;
        out.a_ = a;
        return out;
    }

    /// True when the two curves differ at most in their intercept a.
    bool same_shape(const CurveSpec& o) const noexcept {
        return family_ == o.family_ && b_ == o.b_ && shape_ == o.shape_ && scale_ == o.scale_ &&
               domain_min_ == o.domain_min_;
    }

    double value(double n) const {
        check_domain(n);
        switch (family_) {
        case CurveFamily::power: return scale_ * (a_ + b_ * std::pow(n, shape_));
        case CurveFamily::log_affine: return scale_ * (a_ + b_ * std::log1p(n));
        case CurveFamily::affine: return scale_ * (a_ + b_ * n);
        case CurveFamily::constant: return scale_ * a_;
        case CurveFamily::hyperbolic: return scale_ * (a_ + b_ / (n + shape_));
        }
        return 0.0;
    }

    double derivative(double n) const {
        check_domain(n);
        switch (family_) {
        case CurveFamily::power: return scale_ * (b_ * shape_ * std::pow(n, shape_ - 1.0));
        case CurveFamily::log_affine: return scale_ * (b_ / (1.0 + n));
        case CurveFamily::affine: return scale_ * b_;
        case CurveFamily::constant: return 0.0;
        case CurveFamily::hyperbolic: {
            const double d = n + shape_;
            return scale_ * (-b_ / (d * d));
        }
        }
        return 0.0;
    }

    double second_derivative(double n) const {
        check_domain(n);
        switch (family_) {
        case CurveFamily::power:
            if (shape_ == 1.0) return 0.0;
            return scale_ * (b_ * shape_ * (shape_ - 1.0) * std::pow(n, shape_ - 2.0));
        case CurveFamily::log_affine: {
            const double d = 1.0 + n;
            return scale_ * (-b_ / (d * d));
        }
        case CurveFamily::affine:
        case CurveFamily::constant: return 0.0;
        case CurveFamily::hyperbolic: {
            const double d = n + shape_;
            return scale_ * (2.0 * b_ / (d * d * d));
        }
        }
        return 0.0;
    }

    /// Sign of f' on the open domain derived from the coefficients alone.
    Sign slope_sign() const noexcept {
        switch (family_) {
        case CurveFamily::power:
        case CurveFamily::log_affine: return Sign::positive;
        case CurveFamily::affine: return b_ > 0.0 ? Sign::positive : (b_ < 0.0 ? Sign::negative : Sign::zero);
        case CurveFamily::constant: return Sign::zero;
        case CurveFamily::hyperbolic: return Sign::negative;
        }
        return Sign::zero;
    }

    /// Sign of f'' on the open domain derived from the coefficients alone.
    Sign curvature_sign() const noexcept {
        switch (family_) {
        case CurveFamily::power:
            return shape_ < 1.0 ? Sign::negative : (shape_ > 1.0 ? Sign::positive : Sign::zero);
        case CurveFamily::log_affine: return Sign::negative;
        case CurveFamily::affine:
        case CurveFamily::constant: return Sign::zero;
        case CurveFamily::hyperbolic: return Sign::positive;
        }
        return Sign::zero;
    }

    /// f' vanishes identically.
    bool is_flat() const noexcept { return slope_sign() == Sign::zero; }

private:
    CurveSpec(CurveFamily family, double a, double b, double shape, double domain_min)
        : family_(family), a_(a), b_(b), shape_(shape), domain_min_(domain_min) {
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(shape))
            throw ValidationError("curve coefficients must be finite");
        if (!(domain_min >= 0.0) || !std::isfinite(domain_min))
            throw ValidationError("curve domain_min must be a finite value >= 0");
    }

    void check_domain(double n) const {
        if (!(n >= domain_min_)) {
            std::ostringstream os;
            os << "N = " << n << " is below the curve domain minimum " << domain_min_;
            throw DomainError(os.str());
        }
    }

    CurveFamily family_;
    double a_;
    double b_;
    double shape_;
    double scale_ = 1.0;
    double domain_min_;
};

enum class CurveRole { publish, read };

inline std::string_view to_string(CurveRole r) noexcept { return r == CurveRole::publish ? "publish" : "read"; }

/// Number of interior sample points used by validate_curve.
inline constexpr std::size_t kShapeSamples = 1000;

/// Enforces the role's shape contract on `range` (clipped to the curve domain):
/// publish curves must be increasing and concave, read curves decreasing and
/// convex (constants qualify for both). Fee values must be non-negative.
/// Throws ShapeError naming the violated property.
inline void validate_curve(const CurveSpec& curve, CurveRole role, Interval range) {
    const double lo = std::max(range.lo, curve.domain_min());
    const double hi = range.hi;
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi))
        throw ValidationError("curve validation range must be finite with lo <= hi");

    const std::string who{to_string(role)};
    const Sign slope = curve.slope_sign();
    const Sign curvature = curve.curvature_sign();
    if (role == CurveRole::publish) {
        if (slope == Sign::negative) throw ShapeError(who + " curve not increasing");
        if (curvature == Sign::positive) throw ShapeError(who + " curve not concave");
    } else {
        if (slope == Sign::positive) throw ShapeError(who + " curve not decreasing");
        if (curvature == Sign::negative) throw ShapeError(who + " curve not convex");
    }

    auto sample_at = [&](std::size_t i) {
        if (i == 0) return lo;
        if (i == kShapeSamples + 1) return hi;
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kShapeSamples + 1);
    };
    for (std::size_t i = 0; i <= kShapeSamples + 1; ++i) {
        const double n = sample_at(i);
        const double v = curve.value(n);
        if (!(v >= 0.0)) {
            std::ostringstream os;
            os << who << " curve negative at N = " << n;
            throw ShapeError(os.str());
        }
        const double d1 = curve.derivative(n);
        const double d2 = curve.second_derivative(n);
        const bool slope_ok = role == CurveRole::publish ? !(d1 < 0.0) : !(d1 > 0.0);
        const bool curv_ok = role == CurveRole::publish ? !(d2 > 0.0) : !(d2 < 0.0);
        if (!slope_ok) throw ShapeError(who + (role == CurveRole::publish ? " curve not increasing" : " curve not decreasing"));
        if (!curv_ok) throw ShapeError(who + (role == CurveRole::publish ? " curve not concave" : " curve not convex"));
    }
}

} // namespace parfee
