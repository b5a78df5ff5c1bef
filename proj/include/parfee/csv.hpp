#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace parfee::csv {

/// Shortest decimal that round-trips to the same double. NaN prints as "nan",
/// negative zero as "0".
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string format_flag(bool b) { return b ? "1" : "0"; }

/// Comma-separated rows with LF endings; fields are numbers or bare enum tokens.
class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void header(const std::vector<std::string_view>& names) { row_of(names); }

    void row(const std::vector<std::string>& fields) { row_of(fields); }

private:
    template <class Seq>
    void row_of(const Seq& fields) {
        bool first = true;
        for (const auto& f : fields) {
            if (!first) out_ << ',';
            out_ << f;
            first = false;
        }
        out_ << '\n';
    }

    std::ostream& out_;
};

} // namespace parfee::csv
