#pragma once

// Command-line front end:
//
//   parfee <threshold|fee-curve|profit-curve|duopoly|verify> --scenario <path>
//          [--out <path>] [--grid lo:hi:steps] [--tol <x>]
//
// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 I/O error.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parfee/competition.hpp"
#include "parfee/csv.hpp"
#include "parfee/errors.hpp"
#include "parfee/model.hpp"
#include "parfee/scenario.hpp"
#include "parfee/tables.hpp"
#include "parfee/verify.hpp"

namespace parfee::cli {

enum ExitCode : int { ok = 0, verification_failed = 1, config_error = 2, io_error = 3 };

struct Options {
    std::string scenario_path;
    std::string out_path;
    std::string grid_spec;
    std::optional<double> tol;
};

/// Parses "lo:hi:steps".
inline Grid parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError("--grid", "expected lo:hi:steps, got '" + spec + "'");
    auto num = [&](const std::string& s) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
            throw ConfigError("--grid", "bad number '" + s + "'");
        return v;
    };
    std::size_t steps = 0;
    auto [p, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), steps);
    if (ec != std::errc{} || p != parts[2].data() + parts[2].size() || parts[2].empty())
        throw ConfigError("--grid", "bad step count '" + parts[2] + "'");
    try {
        return Grid(num(parts[0]), num(parts[1]), steps);
    } catch (const ValidationError& e) {
        throw ConfigError("--grid", e.what());
    }
}

namespace detail {

/// Grid override for N sweeps; curves are re-validated when it leaves the loaded range.
inline Grid volume_grid(const Scenario& scn, const Options& opt) {
    if (opt.grid_spec.empty()) return scn.sweep;
    const Grid g = parse_grid(opt.grid_spec);
    const Interval range{scn.ta.domain_min(), std::max(g.hi(), scn.ta.validated_on().hi)};
    if (g.lo() < range.lo) throw ConfigError("--grid", "lower bound below the TA curve domain");
    try {
        validate_curve(scn.ta.publish(), CurveRole::publish, range);
        validate_curve(scn.ta.read(), CurveRole::read, range);
    } catch (const ValidationError& e) {
        throw ConfigError("--grid", e.what());
    }
    return g;
}

inline void emit(const Options& opt, const std::string& payload, std::ostream& out) {
    if (opt.out_path.empty()) {
        out << payload;
        return;
    }
    std::ofstream f(opt.out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("--out: cannot open '" + opt.out_path + "' for writing");
    f << payload;
    f.flush();
    if (!f) throw IoError("--out: write to '" + opt.out_path + "' failed");
}

} // namespace detail

inline int cmd_threshold(const Scenario& scn, const Options& opt, std::ostream& out) {
    const Grid g = detail::volume_grid(scn, opt);
    const double tol = opt.tol.value_or(scn.tolerances.root_tol);
    if (!(tol > 0.0)) throw ConfigError("--tol", "must be > 0");
    try {
        const RegimeThreshold t = threshold(scn.ta, g.lo(), g.hi(), tol);
        char line[64];
        std::snprintf(line, sizeof line, "%.6f", t.n_tilde);
        out << "N_tilde = " << line << '\n'
            << "residual = " << csv::format_number(t.residual) << '\n'
            << "bracket = [" << csv::format_number(t.bracket_lo) << "," << csv::format_number(t.bracket_hi) << "]\n";
    } catch (const NoRootError& e) {
        out << e.what() << '\n';
    }
    return ok;
}

inline int cmd_curve(const Scenario& scn, const Options& opt, bool with_schedule, std::ostream& out) {
    const Grid g = detail::volume_grid(scn, opt);
    const auto table = curve_sweep(scn.ta, g);
    std::optional<StabilizedFeeSchedule> sched;
    if (with_schedule && scn.stabilize) {
        try {
            sched = StabilizedFeeSchedule::anchored_at_upper(scn.ta, scn.stabilize->lo, scn.stabilize->hi);
        } catch (const ValidationError& e) {
            throw ConfigError("stabilize", e.what());
        }
    }
    std::ostringstream buf;
    write_curve_csv(buf, table, sched ? &*sched : nullptr);
    detail::emit(opt, buf.str(), out);
    return ok;
}

inline int cmd_duopoly(const Scenario& scn, const Options& opt, std::ostream& out) {
    const DuopolyScenario d = scn.duopoly();
    const Grid g = opt.grid_spec.empty() ? scn.shift_grid() : parse_grid(opt.grid_spec);
    SweepTable<ShiftRecord> table;
    try {
        table = shift_sweep(d, g, scn.classify_options());
    } catch (const ValidationError& e) {
        throw ConfigError(opt.grid_spec.empty() ? "market.shift_lo" : "--grid", e.what());
    }
    std::ostringstream buf;
    write_shift_csv(buf, table);
    detail::emit(opt, buf.str(), out);
    return ok;
}

inline int cmd_verify(const Scenario& scn, const Options& opt, std::ostream& out) {
    Tolerances tol = scn.tolerances;
    if (opt.tol) {
        if (*opt.tol < 0.0) throw ConfigError("--tol", "must be >= 0");
        tol.deriv_tol = *opt.tol;
    }
    const Grid g = detail::volume_grid(scn, opt);
    const VerificationReport rep = verify_scenario(scn, g, tol);
    std::size_t passed = 0;
    for (const auto& c : rep.checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        if (c.pass) ++passed;
    }
    out << scn.name << ": " << passed << "/" << rep.checks.size() << " checks passed\n";
    return rep.all_pass() ? ok : verification_failed;
}

/// Runs the CLI on `args` (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Publish-and-read fee model: thresholds, sweeps, duopoly shifts and verification", "parfee"};
    app.require_subcommand(1, 1);

    Options opt;
    double tol_value = 0.0;
    std::vector<CLI::App*> subs;
    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", opt.scenario_path, "scenario file")->required();
        sub->add_option("--out", opt.out_path, "output file (default: stdout)");
        sub->add_option("--grid", opt.grid_spec, "sweep grid override lo:hi:steps");
        sub->add_option("--tol", tol_value, "tolerance override (root tol for threshold, derivative tol for verify)");
        subs.push_back(sub);
        return sub;
    };
    CLI::App* threshold_cmd = add("threshold", "print the regime-switch volume N_tilde");
    CLI::App* fee_cmd = add("fee-curve", "fee sweep over N as CSV");
    CLI::App* profit_cmd = add("profit-curve", "profit sweep over N as CSV, with the stabilized schedule if configured");
    CLI::App* duopoly_cmd = add("duopoly", "shift sweep between TA and OA publishers as CSV");
    CLI::App* verify_cmd = add("verify", "run the numerical verification suite");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return config_error;
    }

    for (CLI::App* sub : subs)
        if (sub->count("--tol") > 0) opt.tol = tol_value;

    try {
        const Scenario scn = parse_scenario_file(opt.scenario_path);
        if (threshold_cmd->parsed()) return cmd_threshold(scn, opt, out);
        if (fee_cmd->parsed()) return cmd_curve(scn, opt, false, out);
        if (profit_cmd->parsed()) return cmd_curve(scn, opt, true, out);
        if (duopoly_cmd->parsed()) return cmd_duopoly(scn, opt, out);
        if (verify_cmd->parsed()) return cmd_verify(scn, opt, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return io_error;
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return verification_failed;
    }
    return config_error;
}

} // namespace parfee::cli
