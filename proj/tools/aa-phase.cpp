// aa-phase -- command-line front end for the aaphase library.
//
// Subcommands:
//   evolve  tabulate the closed-form evolution (optionally vs. the oracle)
//   phase   global/dynamical/geometric phase of one cyclic evolution
//   scan    sweep omega, d0, or the adiabatic order and classify each point
//   verify  run the built-in acceptance criteria
//
// Exit codes: 0 success, 1 criterion/check failure, 2 bad configuration,
// 3 integrator failure, 4 constraint mismatch / no solution.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <aaphase/aaphase.hpp>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out;
    std::string format;
    double tol = 0.0;
    bool oracle = false;
    bool degrees = false;
    std::vector<std::string> overrides;

    CLI::Option* format_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
};

void attach_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--config", a.config_path, "flat key = value configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", a.out, "output file (default: stdout)");
    a.format_opt = sub->add_option("--format", a.format, "csv or json");
    a.tol_opt = sub->add_option("--tol", a.tol, "oracle integration tolerance");
    sub->add_flag("--oracle", a.oracle, "also run the numeric oracle");
    sub->add_flag("--degrees", a.degrees, "show angles in degrees (display only)");
    sub->add_option("overrides", a.overrides, "trailing key=value overrides");
}

// Build the run configuration: config file first, then explicit flags, then
// positional key=value overrides (strongest).
aaphase::RunConfig assemble(const CommonArgs& a) {
    aaphase::RunConfig cfg = a.config_path.empty()
                                 ? aaphase::RunConfig{}
                                 : aaphase::parse_config_file(a.config_path);
    if (!a.out.empty()) cfg.out = a.out;
    if (a.format_opt && a.format_opt->count() > 0) cfg.format = a.format;
    if (a.tol_opt && a.tol_opt->count() > 0) cfg.tol = a.tol;
    if (a.oracle) cfg.oracle = true;
    if (a.degrees) cfg.degrees = true;
    for (const auto& ov : a.overrides) aaphase::apply_override(cfg, ov);
    return cfg;
}

template <typename F>
int guarded(F&& f) {
    using namespace aaphase;
    try {
        return f();
    } catch (const config_error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const integration_failure& e) {
        std::fprintf(stderr,
                     "integration failure: %s (achieved error %.3g after %zu steps)\n",
                     e.what(), e.achieved_error, e.steps_used);
        return 3;
    } catch (const constraint_mismatch& e) {
        std::fprintf(stderr, "constraint mismatch: %s (Gamma/omega = %.17g)\n",
                     e.what(), e.gamma_over_omega);
        return 4;
    } catch (const no_solution& e) {
        std::fprintf(stderr, "no solution: %s\n", e.what());
        return 4;
    } catch (const not_cyclic& e) {
        std::fprintf(stderr, "not cyclic: %s (fidelity defect %.3g)\n", e.what(),
                     e.fidelity_defect);
        return 4;
    } catch (const degenerate_nullspace& e) {
        std::fprintf(stderr, "degenerate nullspace: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact cyclic dynamics and geometric phases of a driven two-level system"};
    app.require_subcommand(1);

    CommonArgs ev, ph, sc;
    CLI::App* evolve = app.add_subcommand("evolve", "tabulate the evolution");
    attach_common(evolve, ev);
    CLI::App* phase = app.add_subcommand("phase", "phases of one cyclic evolution");
    attach_common(phase, ph);
    CLI::App* scan = app.add_subcommand("scan", "sweep one parameter axis");
    attach_common(scan, sc);

    CLI::App* verify = app.add_subcommand("verify", "run the acceptance criteria");
    std::string verify_out;
    bool verify_json = false;
    verify->add_option("--out", verify_out, "output file (default: stdout)");
    verify->add_flag("--json", verify_json, "emit the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (evolve->parsed()) return guarded([&] { return aaphase::cmd_evolve(assemble(ev)); });
    if (phase->parsed()) return guarded([&] { return aaphase::cmd_phase(assemble(ph)); });
    if (scan->parsed()) return guarded([&] { return aaphase::cmd_scan(assemble(sc)); });
    if (verify->parsed())
        return guarded([&] { return aaphase::cmd_verify(verify_json, verify_out); });
    return 2;
}
