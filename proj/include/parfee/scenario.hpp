#pragma once

// Scenario files: a flat, sectioned key = value text format.
//
//   # comment
//   name = fig1
//
//   [ta]
//   publish.family = power        # power | log-affine | affine | constant | hyperbolic
//   publish.a = 0
//   publish.b = 10
//   publish.gamma = 0.5
//   read.family = constant
//   read.a = 50
//   marginal_cost = 20
//   fixed_cost = 1000
//
//   [sweep]
//   lo = 1
//   hi = 250
//   steps = 250
//
// Optional sections: [oa] (publish.*, marginal_cost, fixed_cost), [market]
// (budget, n_total, shift_lo, shift_hi, shift_steps, contracted_volume,
// contracted_fee), [stabilize] (lo, hi) and [tolerances] (root_tol,
// deriv_tol, identity_tol, near_zero_band). Unknown or duplicate keys are
// errors.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "parfee/competition.hpp"
#include "parfee/curve.hpp"
#include "parfee/errors.hpp"
#include "parfee/model.hpp"
#include "parfee/numerics.hpp"

namespace parfee {

struct Tolerances {
    double root_tol = 1e-10;
    double deriv_tol = 1e-4;
    double identity_tol = 1e-3;
    std::optional<double> near_zero_band;
};

struct Scenario {
    std::string name;
    TAPublisher ta;
    Grid sweep;
    std::optional<OAPublisher> oa{};
    std::optional<double> budget{};
    std::optional<double> n_total{};
    std::optional<double> shift_lo{};
    std::optional<double> shift_hi{};
    std::optional<std::size_t> shift_steps{};
    std::optional<double> contracted_volume{};
    std::optional<double> contracted_fee{};
    std::optional<Interval> stabilize{};
    Tolerances tolerances{};

    bool has_duopoly() const noexcept { return oa && budget && n_total; }

    /// Throws ConfigError naming the first missing duopoly key.
    DuopolyScenario duopoly() const {
        if (!oa) throw ConfigError("oa", "oa section required");
        if (!budget) throw ConfigError("market.budget", "budget required");
        if (!n_total) throw ConfigError("market.n_total", "n_total required");
        if (!oa->publish().same_shape(ta.publish()))
            throw ConfigError("oa.publish", "must match ta.publish in everything but the intercept a");
        if (oa->publish().a() > ta.publish().a())
            throw ConfigError("oa.publish.a", "OA publish intercept must not exceed the TA intercept");
        try {
            return DuopolyScenario(*budget, *n_total, ta, *oa);
        } catch (const ValidationError& e) {
            throw ConfigError("market", e.what());
        }
    }

    /// Shift grid; defaults to 99 interior points spanning 1%..99% of n_total.
    Grid shift_grid() const {
        if (!n_total) throw ConfigError("market.n_total", "n_total required");
        const double lo = shift_lo.value_or(*n_total / 100.0);
        const double hi = shift_hi.value_or(*n_total * 99.0 / 100.0);
        try {
            return Grid(lo, hi, shift_steps.value_or(99));
        } catch (const ValidationError& e) {
            throw ConfigError("market.shift_lo", e.what());
        }
    }

    ClassifyOptions classify_options() const {
        ClassifyOptions opt;
        opt.near_zero_band = tolerances.near_zero_band;
        opt.fd_slack = tolerances.identity_tol;
        return opt;
    }
};

namespace detail {

struct RawValue {
    std::string text;
    int line = 0;
};

inline std::string_view trim(std::string_view s) noexcept {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

class KeyTable {
public:
    explicit KeyTable(std::map<std::string, RawValue> kv) : kv_(std::move(kv)) {}

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    bool has_prefix(const std::string& prefix) const {
        auto it = kv_.lower_bound(prefix);
        return it != kv_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
    }

    std::optional<std::string> take_string(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        std::string v = it->second.text;
        kv_.erase(it);
        return v;
    }

    std::optional<double> take_double(const std::string& key) {
        auto s = take_string(key);
        if (!s) return std::nullopt;
        double v = 0.0;
        const char* first = s->data();
        const char* last = s->data() + s->size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last || !std::isfinite(v))
            throw ConfigError(key, "expected a finite number, got '" + *s + "'");
        return v;
    }

    std::optional<std::size_t> take_count(const std::string& key) {
        auto s = take_string(key);
        if (!s) return std::nullopt;
        std::size_t v = 0;
        const char* last = s->data() + s->size();
        auto [ptr, ec] = std::from_chars(s->data(), last, v);
        if (ec != std::errc{} || ptr != last) throw ConfigError(key, "expected a positive integer, got '" + *s + "'");
        return v;
    }

    double require_double(const std::string& key) {
        auto v = take_double(key);
        if (!v) throw ConfigError(key, "required key missing");
        return *v;
    }

    void reject_leftovers() const {
        if (kv_.empty()) return;
        const auto& [key, raw] = *kv_.begin();
        throw ConfigError(key, "unknown key (line " + std::to_string(raw.line) + ")");
    }

private:
    std::map<std::string, RawValue> kv_;
};

inline std::map<std::string, RawValue> tokenize(std::istream& in) {
    static const std::vector<std::string> sections = {"ta", "oa", "market", "sweep", "stabilize", "tolerances"};
    std::map<std::string, RawValue> kv;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        if (view.front() == '[') {
            if (view.back() != ']') throw ConfigError("line " + std::to_string(lineno), "malformed section header");
            section = std::string(trim(view.substr(1, view.size() - 2)));
            if (std::find(sections.begin(), sections.end(), section) == sections.end())
                throw ConfigError(section, "unknown section");
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        const std::string key{trim(view.substr(0, eq))};
        const std::string value{trim(view.substr(eq + 1))};
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        const std::string path = section.empty() ? key : section + "." + key;
        if (value.empty()) throw ConfigError(path, "empty value");
        if (!kv.emplace(path, RawValue{value, lineno}).second) throw ConfigError(path, "duplicate key");
    }
    return kv;
}

inline CurveSpec take_curve(KeyTable& keys, const std::string& prefix) {
    const auto family_name = keys.take_string(prefix + ".family");
    if (!family_name) throw ConfigError(prefix + ".family", "required key missing");
    const auto family = parse_family(*family_name);
    if (!family) throw ConfigError(prefix + ".family", "unknown family '" + *family_name + "'");

    const double domain_min = keys.take_double(prefix + ".domain_min").value_or(0.0);
    const double scale = keys.take_double(prefix + ".scale").value_or(1.0);
    try {
        CurveSpec c = [&] {
            switch (*family) {
            case CurveFamily::power:
                return CurveSpec::power(keys.require_double(prefix + ".a"), keys.require_double(prefix + ".b"),
                                        keys.require_double(prefix + ".gamma"), domain_min);
            case CurveFamily::log_affine:
                return CurveSpec::log_affine(keys.require_double(prefix + ".a"), keys.require_double(prefix + ".b"),
                                             domain_min);
            case CurveFamily::affine:
                return CurveSpec::affine(keys.require_double(prefix + ".a"), keys.require_double(prefix + ".b"),
                                         domain_min);
            case CurveFamily::constant: return CurveSpec::constant(keys.require_double(prefix + ".a"), domain_min);
            case CurveFamily::hyperbolic:
                return CurveSpec::hyperbolic(keys.require_double(prefix + ".a"), keys.require_double(prefix + ".b"),
                                             keys.require_double(prefix + ".s"), domain_min);
            }
            throw ConfigError(prefix + ".family", "unhandled family");
        }();
        return scale == 1.0 ? c : c.scaled(scale);
    } catch (const ValidationError& e) {
        throw ConfigError(prefix, e.what());
    }
}

inline void validate_role(const CurveSpec& c, CurveRole role, Interval range, const std::string& prefix) {
    try {
        validate_curve(c, role, range);
    } catch (const ValidationError& e) {
        throw ConfigError(prefix, e.what());
    }
}

inline double take_nonneg(KeyTable& keys, const std::string& key, bool required = true) {
    auto v = keys.take_double(key);
    if (!v) {
        if (required) throw ConfigError(key, "required key missing");
        return 0.0;
    }
    if (*v < 0.0) throw ConfigError(key, "must be >= 0");
    return *v;
}

} // namespace detail

inline Scenario parse_scenario(std::istream& in) {
    detail::KeyTable keys(detail::tokenize(in));

    const std::string name = keys.take_string("name").value_or("unnamed");

    const double sweep_lo = keys.require_double("sweep.lo");
    const double sweep_hi = keys.require_double("sweep.hi");
    const auto steps = keys.take_count("sweep.steps");
    if (!steps) throw ConfigError("sweep.steps", "required key missing");
    std::optional<Grid> sweep_grid;
    try {
        sweep_grid.emplace(sweep_lo, sweep_hi, *steps);
    } catch (const ValidationError& e) {
        throw ConfigError("sweep", e.what());
    }

    const auto budget = keys.take_double("market.budget");
    const auto n_total = keys.take_double("market.n_total");
    const auto shift_lo = keys.take_double("market.shift_lo");
    const auto shift_hi = keys.take_double("market.shift_hi");
    const auto shift_steps = keys.take_count("market.shift_steps");
    const auto contracted_volume = keys.take_double("market.contracted_volume");
    const auto contracted_fee = keys.take_double("market.contracted_fee");
    if (budget && *budget < 0.0) throw ConfigError("market.budget", "must be >= 0");
    if (n_total && !(*n_total > 0.0)) throw ConfigError("market.n_total", "must be > 0");
    if (contracted_fee && !contracted_volume)
        throw ConfigError("market.contracted_volume", "required when contracted_fee is set");

    std::optional<Interval> stabilize;
    if (keys.has_prefix("stabilize.")) {
        const double lo = keys.require_double("stabilize.lo");
        const double hi = keys.require_double("stabilize.hi");
        if (!(lo > 0.0)) throw ConfigError("stabilize.lo", "must be > 0");
        if (!(lo <= hi)) throw ConfigError("stabilize.hi", "must be >= stabilize.lo");
        stabilize = Interval{lo, hi};
    }

    // Shape contracts are enforced on everything the commands may evaluate.
    double range_hi = sweep_grid->hi();
    for (const auto& v : {n_total, contracted_volume}) range_hi = std::max(range_hi, v.value_or(range_hi));
    if (stabilize) range_hi = std::max(range_hi, stabilize->hi);

    const CurveSpec ta_publish = detail::take_curve(keys, "ta.publish");
    const CurveSpec ta_read = detail::take_curve(keys, "ta.read");
    const Interval ta_range{std::max(ta_publish.domain_min(), ta_read.domain_min()), range_hi};
    if (sweep_grid->lo() < ta_range.lo) throw ConfigError("sweep.lo", "below the TA curve domain");
    detail::validate_role(ta_publish, CurveRole::publish, ta_range, "ta.publish");
    detail::validate_role(ta_read, CurveRole::read, ta_range, "ta.read");
    const double ta_c = detail::take_nonneg(keys, "ta.marginal_cost");
    const double ta_f = detail::take_nonneg(keys, "ta.fixed_cost");

    std::optional<OAPublisher> oa;
    if (keys.has_prefix("oa.")) {
        const CurveSpec oa_publish = detail::take_curve(keys, "oa.publish");
        const Interval oa_range{oa_publish.domain_min(), range_hi};
        detail::validate_role(oa_publish, CurveRole::publish, oa_range, "oa.publish");
        const double c = detail::take_nonneg(keys, "oa.marginal_cost", false);
        const double f = detail::take_nonneg(keys, "oa.fixed_cost", false);
        oa.emplace(oa_publish, c, f, oa_range);
    }

    Tolerances tol;
    if (auto v = keys.take_double("tolerances.root_tol")) {
        if (!(*v > 0.0)) throw ConfigError("tolerances.root_tol", "must be > 0");
        tol.root_tol = *v;
    }
    if (auto v = keys.take_double("tolerances.deriv_tol")) {
        if (*v < 0.0) throw ConfigError("tolerances.deriv_tol", "must be >= 0");
        tol.deriv_tol = *v;
    }
    if (auto v = keys.take_double("tolerances.identity_tol")) {
        if (*v < 0.0) throw ConfigError("tolerances.identity_tol", "must be >= 0");
        tol.identity_tol = *v;
    }
    if (auto v = keys.take_double("tolerances.near_zero_band")) {
        if (*v < 0.0) throw ConfigError("tolerances.near_zero_band", "must be >= 0");
        tol.near_zero_band = *v;
    }

    keys.reject_leftovers();

    Scenario scn{name, TAPublisher(ta_publish, ta_read, ta_c, ta_f, ta_range), *sweep_grid};
    scn.oa = std::move(oa);
    scn.budget = budget;
    scn.n_total = n_total;
    scn.shift_lo = shift_lo;
    scn.shift_hi = shift_hi;
    scn.shift_steps = shift_steps;
    scn.contracted_volume = contracted_volume;
    scn.contracted_fee = contracted_fee;
    scn.stabilize = stabilize;
    scn.tolerances = tol;
    if (scn.has_duopoly()) (void)scn.duopoly();  // surface duopoly consistency errors at load time
    return scn;
}

inline Scenario parse_scenario_text(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scenario file '" + path + "'");
    return parse_scenario(in);
}

} // namespace parfee
