// cli.hpp -- implementations of the aa-phase subcommands.
//
// Kept separate from the argument-parsing shell in tools/ so tests can call
// the commands directly with a RunConfig.  Every command writes its machine
// output (CSV or JSON) to the configured destination and keeps any
// human-facing notes on stderr; with fixed inputs the machine output is
// byte-identical from run to run, whatever AA_PHASE_THREADS says.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "io.hpp"
#include "model.hpp"
#include "phase.hpp"
#include "propagator.hpp"
#include "regimes.hpp"
#include "verify.hpp"

namespace aaphase {

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline InitialState state_from_config(const RunConfig& cfg) {
    return make_initial_state(cplx(cfg.re_c1, cfg.im_c1),
                              cplx(cfg.re_c2, cfg.im_c2));
}

inline std::string angle_display(double rad, bool degrees) {
    return degrees ? format_double(rad * 180.0 / pi) + " deg"
                   : format_double(rad) + " rad";
}

// Short deterministic spelling for human-facing lines (3 significant digits).
inline std::string brief(double v) {
    char buf[32];
    const auto r =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 3);
    return std::string(buf, r.ptr);
}

inline unsigned thread_count() {
    if (const char* env = std::getenv("AA_PHASE_THREADS")) {
        const int n = parse_int(env, "AA_PHASE_THREADS");
        if (n < 1 || n > 256)
            throw config_error("AA_PHASE_THREADS must be in [1, 256]");
        return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : (hw > 8u ? 8u : hw);
}

// Index-parallel map with a work-stealing counter.  `f` must not throw;
// results are written by index so the serialization order is fixed.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
    const std::size_t tc = std::min<std::size_t>(thread_count(), n == 0 ? 1 : n);
    if (tc <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(tc);
    for (std::size_t w = 0; w < tc; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace detail

// ---------------------------------------------------------------------------
// evolve: tabulate the closed-form evolution (optionally against the oracle).
// ---------------------------------------------------------------------------

inline int cmd_evolve(const RunConfig& cfg) {
    validate(cfg.params);
    const InitialState s0 = detail::state_from_config(cfg);
    const double T = rabi(cfg.params).t_field;
    const double t_max = std::isnan(cfg.t_max) ? 5.0 * T : cfg.t_max;
    if (!(t_max > 0.0)) throw config_error("t_max must be > 0");
    if (cfg.n_points < 2) throw config_error("n_points must be >= 2");

    std::vector<double> ts(static_cast<std::size_t>(cfg.n_points));
    for (std::size_t k = 0; k < ts.size(); ++k)
        ts[k] = t_max * static_cast<double>(k) / (ts.size() - 1);

    std::optional<NumericTrajectory> oracle;
    if (cfg.oracle)
        oracle = evolve_numeric_many(cfg.params, bare_state_closed(cfg.params, s0, 0.0),
                                     ts, cfg.tol);

    std::vector<std::string> header{"t",     "re_c1", "im_c1", "re_c2",
                                    "im_c2", "pop1",  "pop2",  "mean_energy"};
    if (cfg.oracle) header.push_back("oracle_dev");
    std::vector<std::vector<double>> raw;
    double worst_dev = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const AmplitudeState st = evolve_closed(cfg.params, s0, ts[k]);
        std::vector<double> row{ts[k],
                                st.ctilde1.real(),
                                st.ctilde1.imag(),
                                st.ctilde2.real(),
                                st.ctilde2.imag(),
                                std::norm(st.ctilde1),
                                std::norm(st.ctilde2),
                                mean_energy(cfg.params, s0, ts[k])};
        if (cfg.oracle) {
            const double dev = max_abs_diff(bare_state_closed(cfg.params, s0, ts[k]),
                                            oracle->states[k]);
            worst_dev = std::max(worst_dev, dev);
            row.push_back(dev);
        }
        raw.push_back(std::move(row));
    }

    if (cfg.format == "csv") {
        Table tab;
        tab.header = header;
        for (const auto& row : raw) {
            std::vector<std::string> cells;
            cells.reserve(row.size());
            for (double v : row) cells.push_back(format_double(v));
            tab.rows.push_back(std::move(cells));
        }
        write_output(cfg.out, render_csv(tab));
    } else if (cfg.format == "json") {
        detail::ordered_json j;
        j["columns"] = header;
        j["rows"] = raw;
        write_output(cfg.out, j.dump(2) + "\n");
    } else {
        throw config_error("format must be 'csv' or 'json'");
    }

    if (cfg.oracle && worst_dev > 1e-7) {
        std::fprintf(stderr,
                     "closed form deviates from the oracle by %s (> 1e-7)\n",
                     detail::brief(worst_dev).c_str());
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// phase: one cyclic evolution, one record.
// ---------------------------------------------------------------------------

namespace detail {

struct PhaseOutcome {
    PhaseRecord rec;
    double tau;
    InitialState s0;          // the state the record is about (possibly emitted)
    double fidelity_defect;
    double cross_check;       // formula branches: |beta - beta_numeric| on the
                              // circle; numeric branch: closed dyn vs quadrature
};

inline PhaseOutcome run_phase_branch(const RunConfig& cfg) {
    const ModelParams& p = cfg.params;
    const double T = rabi(p).t_field;
    const double t_rabi = rabi(p).t_rabi;

    if (cfg.branch == "numeric") {
        if (std::isnan(cfg.tau))
            throw config_error("branch 'numeric' needs tau");
        const InitialState s0 = state_from_config(cfg);
        const auto cyc = detect_cyclic(p, s0, cfg.tau, 1e-9);
        const PhaseRecord rec = aa_phase_numeric(p, s0, cfg.tau);  // throws if not cyclic
        const double quad = dynamical_phase_quadrature(p, s0, cfg.tau, 1e-12);
        return {rec, cfg.tau, s0, cyc->fidelity_defect, std::abs(rec.dyn - quad)};
    }

    const auto with_user_state = [&](const PhaseRecord& rec,
                                     double tau) -> PhaseOutcome {
        const InitialState s0 = state_from_config(cfg);
        const auto cyc = detect_cyclic(p, s0, tau, 1e-9);
        if (!cyc)
            throw internal_error("formula branch emitted a non-cyclic evolution");
        const PhaseRecord num = aa_phase_numeric(p, s0, tau);
        return {rec, tau, s0, cyc->fidelity_defect, angle_diff(rec.beta, num.beta)};
    };
    const auto with_emitted_state =
        [&](const std::pair<CyclicSolution, PhaseRecord>& pr) -> PhaseOutcome {
        const PhaseRecord num = aa_phase_numeric(p, pr.first.s0, pr.first.tau);
        return {pr.second, pr.first.tau, pr.first.s0, pr.first.fidelity_defect,
                angle_diff(pr.second.beta, num.beta)};
    };

    if (cfg.branch == "integer-n")
        return with_user_state(case_integer_n(p, cfg.order_n, state_from_config(cfg)), T);
    if (cfg.branch == "half-integer-m")
        return with_user_state(
            case_half_integer_m(p, cfg.order_m, state_from_config(cfg)), T);
    if (cfg.branch == "generic-T" || cfg.branch == "generic-T-plus" ||
        cfg.branch == "generic-T-minus") {
        const int sign = cfg.branch == "generic-T-plus"    ? +1
                         : cfg.branch == "generic-T-minus" ? -1
                                                           : cfg.sign;
        const double d1 = std::isnan(cfg.delta1) ? 0.0 : cfg.delta1;
        return with_emitted_state(case_generic_T(p, sign, d1));
    }
    if (cfg.branch == "commensurate")
        return with_emitted_state(
            commensurate_with_state(p, cfg.comm_m, cfg.comm_n, state_from_config(cfg)));
    if (cfg.branch == "rabi-n1")
        return with_user_state(rabi_cycle_n1(p, state_from_config(cfg)), t_rabi);
    if (cfg.branch == "rabi-gamma0")
        return with_emitted_state(rabi_cycle_special(p, Branch::rabi_gamma0));
    if (cfg.branch == "rabi-gamma-omega")
        return with_emitted_state(rabi_cycle_special(p, Branch::rabi_gamma_omega));
    throw config_error("unknown branch '" + cfg.branch + "'");
}

} // namespace detail

inline int cmd_phase(const RunConfig& cfg) {
    validate(cfg.params);
    const detail::PhaseOutcome oc = detail::run_phase_branch(cfg);

    detail::ordered_json j;
    j["branch"] = to_string(oc.rec.branch);
    j["tau"] = oc.tau;
    j["phi"] = oc.rec.phi;
    j["dyn"] = oc.rec.dyn;
    j["beta"] = oc.rec.beta;
    j["gamma_aux"] = oc.rec.gamma_aux;
    j["fidelity_defect"] = oc.fidelity_defect;
    j["cross_check_deviation"] = oc.cross_check;
    j["s0"] = {{"re_c1", oc.s0.c1_0.real()},
               {"im_c1", oc.s0.c1_0.imag()},
               {"re_c2", oc.s0.c2_0.real()},
               {"im_c2", oc.s0.c2_0.imag()},
               {"delta1", oc.s0.delta1}};
    write_output(cfg.out, j.dump(2) + "\n");

    std::fprintf(stderr, "branch %s: tau = %s, beta = %s (phi = %s, dyn = %s)\n",
                 to_string(oc.rec.branch), detail::brief(oc.tau).c_str(),
                 detail::angle_display(oc.rec.beta, cfg.degrees).c_str(),
                 detail::angle_display(oc.rec.phi, cfg.degrees).c_str(),
                 detail::angle_display(oc.rec.dyn, cfg.degrees).c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// scan: sweep one axis, classify each point, tabulate geometric phases for a
// fixed three-state family.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<InitialState> scan_family() {
    const double r = 1.0 / std::sqrt(2.0);
    return {make_initial_state(1.0, 0.0), make_initial_state(0.0, 1.0),
            make_initial_state(r, r)};
}

struct ScanRow {
    double value = 0.0;
    double omega = 0.0;
    double d0 = 0.0;
    double ratio = 0.0;
    std::string branch;
    std::string status;
    std::optional<double> beta[3];
};

// Classify Gamma/omega at tau = T and fill in the family's geometric phases
// when the whole family is cyclic there.  Never throws: any error lands in
// the row's status.
inline ScanRow classify_row(const ModelParams& p, double value) {
    ScanRow row;
    row.value = value;
    row.omega = p.omega;
    row.d0 = p.d0;
    try {
        validate(p);
        const double ratio = rabi(p).gamma / p.omega;
        row.ratio = ratio;
        const long k = std::lround(2.0 * ratio);
        const auto family = scan_family();
        if (k >= 2 && std::abs(ratio - 0.5 * static_cast<double>(k)) <= 1e-9) {
            if (k % 2 == 0) {
                const int n = static_cast<int>(k / 2);
                row.branch = "integer-n";
                row.status = "ok";
                for (int s = 0; s < 3; ++s)
                    row.beta[s] =
                        principal_angle(case_integer_n(p, n, family[s]).beta);
            } else {
                const double m = 0.5 * static_cast<double>(k);
                row.branch = "half-integer-m";
                row.status = "ok";
                for (int s = 0; s < 3; ++s)
                    row.beta[s] =
                        principal_angle(case_half_integer_m(p, m, family[s]).beta);
            }
        } else {
            // Off the half-integer loci only two special states are cyclic
            // at T; the fixed family is not, so there is nothing to report.
            row.branch = "generic-T";
            row.status = "not-cyclic";
        }
    } catch (const error& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

inline ScanRow adiabatic_row(const ModelParams& base, int n) {
    ScanRow row;
    row.value = static_cast<double>(n);
    row.d0 = base.d0;
    try {
        validate(base);
        const double deps = base.delta_eps();
        const double a = static_cast<double>(n) * n - 0.25;
        const double half_eps = 0.5 * deps;
        const double c = 0.25 * deps * deps + base.d0 * base.d0;
        const double omega_n =
            (half_eps + std::sqrt(half_eps * half_eps + 4.0 * a * c)) / (2.0 * a);
        row.omega = omega_n;
        ModelParams p = base;
        p.omega = omega_n;
        row.ratio = rabi(p).gamma / p.omega;
        row.branch = "integer-n";
        if (!(omega_n < deps / 5.0)) {
            row.status = "omega-too-large";
            return row;
        }
        row.status = "ok";
        const auto family = scan_family();
        for (int s = 0; s < 3; ++s)
            row.beta[s] = principal_angle(case_integer_n(p, n, family[s]).beta);
    } catch (const error& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

} // namespace detail

inline int cmd_scan(const RunConfig& cfg) {
    validate(cfg.params);
    if (cfg.axis != "omega" && cfg.axis != "d0" && cfg.axis != "order-n")
        throw config_error("axis must be 'omega', 'd0', or 'order-n'");
    if (cfg.axis_steps < 0) throw config_error("axis_steps must be >= 0");
    if (cfg.axis_steps > 0 && !(cfg.axis_max >= cfg.axis_min))
        throw config_error("axis_max must be >= axis_min");

    std::vector<detail::ScanRow> rows;
    if (cfg.axis == "order-n") {
        const long lo = std::lround(cfg.axis_min);
        const long hi = std::lround(cfg.axis_max);
        if (cfg.axis_steps > 0 && lo < 1)
            throw config_error("order-n scan needs axis_min >= 1");
        std::vector<int> orders;
        if (cfg.axis_steps > 0)
            for (long n = lo; n <= hi; ++n) orders.push_back(static_cast<int>(n));
        rows.resize(orders.size());
        detail::parallel_for(orders.size(), [&](std::size_t i) {
            rows[i] = detail::adiabatic_row(cfg.params, orders[i]);
        });
    } else {
        std::vector<double> values;
        for (int k = 0; k < cfg.axis_steps; ++k)
            values.push_back(cfg.axis_steps == 1
                                 ? cfg.axis_min
                                 : cfg.axis_min + (cfg.axis_max - cfg.axis_min) * k /
                                                      (cfg.axis_steps - 1));
        if (!values.empty()) {
            if (cfg.axis == "omega" && !(values.front() > 0.0))
                throw config_error("omega scan needs axis_min > 0");
            if (cfg.axis == "d0" && values.front() < 0.0)
                throw config_error("d0 scan needs axis_min >= 0");
        }
        rows.resize(values.size());
        detail::parallel_for(values.size(), [&](std::size_t i) {
            ModelParams p = cfg.params;
            (cfg.axis == "omega" ? p.omega : p.d0) = values[i];
            rows[i] = detail::classify_row(p, values[i]);
        });
    }

    Table tab;
    tab.header = {"value",  "omega",  "d0",      "gamma_over_omega", "branch",
                  "status", "beta_e1", "beta_e2", "beta_sym"};
    for (const auto& r : rows) {
        std::vector<std::string> cells{
            format_double(r.value),  format_double(r.omega), format_double(r.d0),
            format_double(r.ratio),  r.branch,               r.status};
        for (int s = 0; s < 3; ++s)
            cells.push_back(r.beta[s] ? format_double(*r.beta[s]) : "");
        tab.rows.push_back(std::move(cells));
    }

    if (cfg.format == "csv") {
        write_output(cfg.out, render_csv(tab));
    } else if (cfg.format == "json") {
        detail::ordered_json j = detail::ordered_json::array();
        for (const auto& r : rows) {
            detail::ordered_json jr;
            jr["value"] = r.value;
            jr["omega"] = r.omega;
            jr["d0"] = r.d0;
            jr["gamma_over_omega"] = r.ratio;
            jr["branch"] = r.branch;
            jr["status"] = r.status;
            const char* names[3] = {"beta_e1", "beta_e2", "beta_sym"};
            for (int s = 0; s < 3; ++s)
                jr[names[s]] =
                    r.beta[s] ? detail::ordered_json(*r.beta[s])
                              : detail::ordered_json(nullptr);
            j.push_back(std::move(jr));
        }
        write_output(cfg.out, j.dump(2) + "\n");
    } else {
        throw config_error("format must be 'csv' or 'json'");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify: the acceptance criteria, as a command.
// ---------------------------------------------------------------------------

inline int cmd_verify(bool json_output, const std::string& out_path) {
    const std::vector<CriterionResult> results = run_acceptance();
    std::string content;
    if (json_output) {
        detail::ordered_json j = detail::ordered_json::array();
        for (const auto& r : results) {
            detail::ordered_json jr;
            jr["id"] = r.id;
            jr["name"] = r.name;
            jr["passed"] = r.passed;
            jr["max_deviation"] = r.max_deviation;
            jr["tolerance"] = r.tolerance;
            jr["detail"] = r.detail;
            j.push_back(std::move(jr));
        }
        content = j.dump(2) + "\n";
    } else {
        for (const auto& r : results) {
            content += r.passed ? "[PASS] " : "[FAIL] ";
            content += (r.id < 10 ? "0" : "") + std::to_string(r.id) + " " + r.name;
            content += ": max deviation " + detail::brief(r.max_deviation) +
                       " (tol " + detail::brief(r.tolerance) + ") -- " + r.detail +
                       "\n";
        }
    }
    write_output(out_path, content);
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    return all ? 0 : 1;
}

} // namespace aaphase
