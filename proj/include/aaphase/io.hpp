// io.hpp -- run configuration (flat key = value files) and deterministic
// text output.
//
// All numeric output goes through std::to_chars with 17 significant digits:
// locale-independent, '.' decimal separator, round-trippable, and byte-stable
// across runs.  Files are written with LF line endings regardless of host.
#pragma once

#include <charconv>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace aaphase {

// Everything a CLI run can be told.  Unset optional values are NaN so that
// an explicit degenerate value (t_max = 0) is distinguishable from "use the
// default" and can be rejected instead of silently replaced.
struct RunConfig {
    ModelParams params{0.0, 1.0, 1.0, 1.0, 0.0};

    // Initial state: eigenbasis amplitudes at t = 0.
    double re_c1 = 1.0, im_c1 = 0.0;
    double re_c2 = 0.0, im_c2 = 0.0;

    // evolve
    double t_max = std::numeric_limits<double>::quiet_NaN();  // default: 5T
    int n_points = 201;

    // phase
    std::string branch = "numeric";
    double tau = std::numeric_limits<double>::quiet_NaN();  // default per branch
    int order_n = 2;
    double order_m = 1.5;
    int comm_m = 3;
    int comm_n = 2;
    int sign = +1;
    double delta1 = std::numeric_limits<double>::quiet_NaN();  // default 0

    // scan
    std::string axis = "omega";
    double axis_min = 0.5;
    double axis_max = 2.5;
    int axis_steps = 21;

    // common
    std::string out;  // empty = stdout
    std::string format = "csv";
    double tol = 1e-10;
    bool oracle = false;
    bool degrees = false;  // affects the human-readable summary only
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, const std::string& where) {
    const char* begin = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (v.empty() || end != begin + v.size())
        throw config_error(where + ": cannot parse '" + v + "' as a number");
    return x;
}

inline int parse_int(const std::string& v, const std::string& where) {
    const char* begin = v.c_str();
    char* end = nullptr;
    const long x = std::strtol(begin, &end, 10);
    if (v.empty() || end != begin + v.size() || x < INT_MIN || x > INT_MAX)
        throw config_error(where + ": cannot parse '" + v + "' as an integer");
    return static_cast<int>(x);
}

inline bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw config_error(where + ": cannot parse '" + v + "' as a boolean");
}

inline int parse_sign(const std::string& v, const std::string& where) {
    if (v == "+" || v == "+1" || v == "1") return +1;
    if (v == "-" || v == "-1") return -1;
    throw config_error(where + ": sign must be '+' or '-'");
}

} // namespace detail

// Apply one key = value assignment; `where` names the source for
// diagnostics ("file.cfg:12" or "override 'k=v'").
inline void apply_key(RunConfig& c, const std::string& key, const std::string& value,
                      const std::string& where) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    if (key == "eps1") c.params.eps1 = parse_double(value, where);
    else if (key == "eps2") c.params.eps2 = parse_double(value, where);
    else if (key == "d0") c.params.d0 = parse_double(value, where);
    else if (key == "omega") c.params.omega = parse_double(value, where);
    else if (key == "phi0") c.params.phi0 = parse_double(value, where);
    else if (key == "re_c1") c.re_c1 = parse_double(value, where);
    else if (key == "im_c1") c.im_c1 = parse_double(value, where);
    else if (key == "re_c2") c.re_c2 = parse_double(value, where);
    else if (key == "im_c2") c.im_c2 = parse_double(value, where);
    else if (key == "t_max") c.t_max = parse_double(value, where);
    else if (key == "n_points") c.n_points = parse_int(value, where);
    else if (key == "branch") c.branch = value;
    else if (key == "tau") c.tau = parse_double(value, where);
    else if (key == "order_n") c.order_n = parse_int(value, where);
    else if (key == "order_m") c.order_m = parse_double(value, where);
    else if (key == "comm_m") c.comm_m = parse_int(value, where);
    else if (key == "comm_n") c.comm_n = parse_int(value, where);
    else if (key == "sign") c.sign = detail::parse_sign(value, where);
    else if (key == "delta1") c.delta1 = parse_double(value, where);
    else if (key == "axis") c.axis = value;
    else if (key == "axis_min") c.axis_min = parse_double(value, where);
    else if (key == "axis_max") c.axis_max = parse_double(value, where);
    else if (key == "axis_steps") c.axis_steps = parse_int(value, where);
    else if (key == "out") c.out = value;
    else if (key == "format") c.format = value;
    else if (key == "tol") c.tol = parse_double(value, where);
    else if (key == "oracle") c.oracle = parse_bool(value, where);
    else if (key == "degrees") c.degrees = parse_bool(value, where);
    else throw config_error(where + ": unknown key '" + key + "'");
}

// Apply a command-line "key=value" override.
inline void apply_override(RunConfig& c, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw config_error("override '" + assignment + "' is not of the form key=value");
    const std::string key = detail::trim(assignment.substr(0, eq));
    const std::string value = detail::trim(assignment.substr(eq + 1));
    if (key.empty())
        throw config_error("override '" + assignment + "' has an empty key");
    apply_key(c, key, value, "override '" + assignment + "'");
}

// Parse a flat key = value file.  '#' starts a comment; blank lines are
// skipped; unknown keys and malformed values are hard errors with a
// file:line diagnostic.
inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw config_error(where + ": expected key = value");
        const std::string key = detail::trim(body.substr(0, eq));
        const std::string value = detail::trim(body.substr(eq + 1));
        if (key.empty()) throw config_error(where + ": empty key");
        apply_key(c, key, value, where);
    }
    return c;
}

// 17 significant digits, shortest spelling to_chars produces for that
// precision; enough to round-trip any double exactly.
inline std::string format_double(double v) {
    char buf[40];
    const auto r =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string render_csv(const Table& t) {
    std::string out;
    const auto join = [&out](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            out += cells[k];
        }
        out += '\n';
    };
    join(t.header);
    for (const auto& row : t.rows) join(row);
    return out;
}

// Write to a file (binary mode, so LF stays LF) or to stdout when the path
// is empty.
inline void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw config_error("failed writing output file '" + path + "'");
}

} // namespace aaphase
