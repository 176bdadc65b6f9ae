// verify.hpp -- the self-check suite behind `aa-phase verify`.
//
// Each criterion exercises one advertised guarantee of the library against
// the independent numeric machinery (RK4 oracle, overlap-based cyclicity,
// adaptive quadrature) on fixed fixtures and fixed-seed random draws, and
// reports the worst deviation it saw together with the tolerance it was
// held to.  Everything here is deterministic: same build, same output.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "phase.hpp"
#include "propagator.hpp"
#include "regimes.hpp"

namespace aaphase {

struct CriterionResult {
    int id;
    std::string name;
    bool passed;
    double max_deviation;  // worst deviation observed, in the units of `tolerance`
    double tolerance;      // the bound that worst deviation was compared against
    std::string detail;
};

namespace detail {

// Accumulates (deviation, tolerance) pairs and boolean requirements; keeps
// the deviation that came closest to (or crossed) its bound.
class Tracker {
  public:
    void check(double dev, double tol, const std::string& what) {
        if (!(dev <= tol)) {  // also catches NaN
            passed_ = false;
            if (note_.empty())
                note_ = what + ": deviation " + std::to_string(dev) +
                        " exceeds " + std::to_string(tol);
        }
        const double ratio = dev / tol;
        if (first_ || ratio > worst_ratio_) {
            first_ = false;
            worst_ratio_ = ratio;
            worst_dev_ = dev;
            worst_tol_ = tol;
        }
    }

    void require(bool cond, const std::string& what) {
        if (!cond) {
            passed_ = false;
            if (note_.empty()) note_ = what;
        }
    }

    CriterionResult result(int id, const char* name,
                           const std::string& pass_detail) const {
        return {id,         name,       passed_, worst_dev_,
                worst_tol_, passed_ ? pass_detail : note_};
    }

  private:
    bool passed_ = true;
    bool first_ = true;
    double worst_ratio_ = 0.0;
    double worst_dev_ = 0.0;
    double worst_tol_ = std::numeric_limits<double>::quiet_NaN();
    std::string note_;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Haar-random pure state: four independent gaussians, normalized.  The
// distribution object is rebuilt per call so no generator-adjacent state
// leaks between draws.
inline InitialState haar_state(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const cplx c1(gauss(rng), gauss(rng));
    const cplx c2(gauss(rng), gauss(rng));
    const double n = std::sqrt(std::norm(c1) + std::norm(c2));
    return make_initial_state(c1 / n, c2 / n);
}

// Shared draw set for the oracle-agreement and unitarity criteria.
struct OracleDraw {
    ModelParams p;
    InitialState s0;
    std::vector<double> ts;  // 50 samples spanning [0, 5T]
};

inline std::vector<OracleDraw> oracle_draws() {
    std::mt19937_64 rng(2026082201ull);
    std::vector<OracleDraw> draws;
    draws.reserve(20);
    for (int d = 0; d < 20; ++d) {
        OracleDraw dr;
        dr.p = ModelParams{0.0, 1.0, uniform(rng, 0.0, 3.0), uniform(rng, 0.05, 3.0),
                           uniform(rng, 0.0, 2.0 * pi)};
        dr.s0 = haar_state(rng);
        const double span = 5.0 * 2.0 * pi / dr.p.omega;
        dr.ts.resize(50);
        for (int k = 0; k < 50; ++k) dr.ts[k] = span * k / 49.0;
        draws.push_back(std::move(dr));
    }
    return draws;
}

template <typename F>
CriterionResult guarded(int id, const char* name, F&& body) {
    try {
        Tracker t;
        const std::string detail = body(t);
        return t.result(id, name, detail);
    } catch (const std::exception& e) {
        return {id, name, false, std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN(),
                std::string("unexpected exception: ") + e.what()};
    }
}

template <typename Exc, typename F>
void expect_throw(Tracker& t, const std::string& what, F&& f) {
    try {
        f();
        t.require(false, what + ": expected a no-solution/constraint error");
    } catch (const Exc&) {
        t.require(true, what);
    }
}

} // namespace detail

// 1. Closed-form propagator agrees with the RK4 oracle in the bare basis.
inline CriterionResult criterion_oracle_agreement() {
    return detail::guarded(1, "closed-vs-oracle", [](detail::Tracker& t) {
        for (const auto& dr : detail::oracle_draws()) {
            const Vec2 psi0 = bare_state_closed(dr.p, dr.s0, 0.0);
            const NumericTrajectory traj =
                evolve_numeric_many(dr.p, psi0, dr.ts, 1e-10);
            for (std::size_t k = 0; k < dr.ts.size(); ++k) {
                const Vec2 closed = bare_state_closed(dr.p, dr.s0, dr.ts[k]);
                t.check(max_abs_diff(closed, traj.states[k]), 1e-7,
                        "closed vs numeric amplitude");
            }
        }
        return "20 random models, 50 samples over [0, 5T] each";
    });
}

// 2. The closed-form evolution is exactly norm-preserving.
inline CriterionResult criterion_unitarity() {
    return detail::guarded(2, "unitarity", [](detail::Tracker& t) {
        for (const auto& dr : detail::oracle_draws()) {
            for (double tk : dr.ts) {
                const AmplitudeState st = evolve_closed(dr.p, dr.s0, tk);
                const double n2 = std::norm(st.ctilde1) + std::norm(st.ctilde2);
                t.check(std::abs(n2 - 1.0), 1e-12, "norm drift");
            }
        }
        return "same draw set as the oracle criterion";
    });
}

// 3. Integer locus Gamma = 2*omega: every state cyclic at T, phi and beta
// match their closed forms.
inline CriterionResult criterion_integer_locus() {
    return detail::guarded(3, "integer-locus", [](detail::Tracker& t) {
        const ModelParams p{0.0, 1.0, std::sqrt(3.0), 1.0, 0.0};
        const double T = rabi(p).t_field;
        std::mt19937_64 rng(2026082203ull);
        for (int d = 0; d < 10; ++d) {
            const InitialState s0 = detail::haar_state(rng);
            const auto cyc = detect_cyclic(p, s0, T, 1e-9);
            t.require(cyc.has_value(), "state not cyclic at T on the n=2 locus");
            if (!cyc) continue;
            t.check(cyc->fidelity_defect, 1e-9, "fidelity defect");
            const PhaseRecord rec = case_integer_n(p, 2, s0);
            t.check(angle_diff(cyc->phi, rec.phi), 1e-9, "global phase");
            const PhaseRecord num = aa_phase_numeric(p, s0, T);
            t.check(angle_diff(rec.beta, num.beta), 1e-8, "geometric phase");
        }
        return "Gamma = 2*omega, 10 random states";
    });
}

// 4. Half-integer locus Gamma = (3/2)*omega, plus the exact pi offset from
// the integer-locus expression at equal order.
inline CriterionResult criterion_half_integer_locus() {
    return detail::guarded(4, "half-integer-locus", [](detail::Tracker& t) {
        const ModelParams p{0.0, 1.0, 0.5 * std::sqrt(5.0), 1.0, 0.0};
        const double T = rabi(p).t_field;
        std::mt19937_64 rng(2026082204ull);
        for (int d = 0; d < 10; ++d) {
            const InitialState s0 = detail::haar_state(rng);
            const auto cyc = detect_cyclic(p, s0, T, 1e-9);
            t.require(cyc.has_value(), "state not cyclic at T on the m=3/2 locus");
            if (!cyc) continue;
            t.check(cyc->fidelity_defect, 1e-9, "fidelity defect");
            const PhaseRecord rec = case_half_integer_m(p, 1.5, s0);
            t.check(angle_diff(cyc->phi, rec.phi), 1e-9, "global phase");
            const PhaseRecord num = aa_phase_numeric(p, s0, T);
            t.check(angle_diff(rec.beta, num.beta), 1e-8, "geometric phase");
            const double integer_shape = detail::beta_order_formula(p, 1.5, s0, -pi);
            t.check(std::abs(rec.beta - integer_shape - pi), 1e-10,
                    "pi offset between branch expressions");
        }
        return "Gamma = 1.5*omega, 10 random states";
    });
}

// 5. Generic drive-period case: the two special states exist, solve the
// cyclicity system, reproduce beta, and beta ignores the overall phase of
// the emitted state.
inline CriterionResult criterion_generic_period() {
    return detail::guarded(5, "generic-period-states", [](detail::Tracker& t) {
        const ModelParams p{0.0, 1.0, 0.5, 0.7, 0.0};
        const Spectrum sp = spectrum(p);
        const RabiData rd = rabi(p);
        const double scale = rd.gamma * rd.gamma * sp.etilde2 * sp.etilde2;
        for (int sign : {+1, -1}) {
            const auto [cyc, rec] = case_generic_T(p, sign);
            t.check(cyc.fidelity_defect, 1e-9, "fidelity defect");
            t.check(std::abs(det_M(p, rec.gamma_aux).value) / scale, 1e-10,
                    "determinant at the root");
            const PhaseRecord num = aa_phase_numeric(p, cyc.s0, rd.t_field);
            t.check(angle_diff(rec.phi, num.phi), 1e-9, "global phase");
            t.check(angle_diff(rec.beta, num.beta), 1e-8, "geometric phase");
            const auto [cyc2, rec2] = case_generic_T(p, sign, 1.3);
            t.check(std::abs(rec2.beta - rec.beta), 1e-10,
                    "beta must not depend on the emitted state's overall phase");
        }
        return "both roots at omega = 0.7, D0 = 0.5";
    });
}

// 6. Rabi-period cases: the Gamma = omega coincidence (all states cyclic)
// and the generic Rabi period (two special states from the determinant
// roots).
inline CriterionResult criterion_rabi_period() {
    return detail::guarded(6, "rabi-period-cases", [](detail::Tracker& t) {
        {
            const ModelParams p{0.0, 1.0, std::sqrt(0.23), 1.2, 0.0};
            const double tau = rabi(p).t_rabi;
            std::mt19937_64 rng(2026082206ull);
            for (int d = 0; d < 10; ++d) {
                const InitialState s0 = detail::haar_state(rng);
                const auto cyc = detect_cyclic(p, s0, tau, 1e-9);
                t.require(cyc.has_value(), "state not cyclic at T_Gamma = T");
                if (!cyc) continue;
                t.check(cyc->fidelity_defect, 1e-9, "fidelity defect");
                const PhaseRecord rec = rabi_cycle_n1(p, s0);
                t.check(angle_diff(cyc->phi, rec.phi), 1e-9, "global phase");
                const PhaseRecord num = aa_phase_numeric(p, s0, tau);
                t.check(angle_diff(rec.beta, num.beta), 1e-8, "geometric phase");
            }
        }
        {
            const ModelParams p{0.0, 1.0, 0.9, 1.0, 0.0};
            const double tau = rabi(p).t_rabi;
            for (Branch which : {Branch::rabi_gamma0, Branch::rabi_gamma_omega}) {
                const auto [cyc, rec] = rabi_cycle_special(p, which);
                t.check(cyc.fidelity_defect, 1e-9, "fidelity defect");
                t.check(std::abs(det_Mtilde(p, rec.gamma_aux, tau).value), 1e-9,
                        "determinant at the root");
                const PhaseRecord num = aa_phase_numeric(p, cyc.s0, tau);
                t.check(angle_diff(rec.phi, num.phi), 1e-9, "global phase");
                t.check(angle_diff(rec.beta, num.beta), 1e-8, "geometric phase");
            }
        }
        return "Gamma = omega with 10 random states; both generic roots";
    });
}

// 7. Commensurate ratio Gamma/omega = 3/4: every state returns at tau = 2T
// with one and the same global phase.
inline CriterionResult criterion_commensurate() {
    return detail::guarded(7, "commensurate-return", [](detail::Tracker& t) {
        const ModelParams p{0.0, 1.0, std::sqrt(1.0625), 3.0, 0.0};
        const CommensurateResult cr = commensurate(p, 3, 2);
        std::mt19937_64 rng(2026082207ull);
        for (int d = 0; d < 10; ++d) {
            const InitialState s0 = detail::haar_state(rng);
            const auto [cyc, rec] = commensurate_with_state(p, 3, 2, s0);
            t.check(cyc.fidelity_defect, 1e-9, "fidelity defect");
            t.check(angle_diff(cyc.phi, cr.phi), 1e-9,
                    "state-independent global phase");
            t.require(rec.branch == Branch::commensurate, "wrong branch tag");
        }
        return "Gamma/omega = 3/4, tau = 2T, 10 random states";
    });
}

// 8. Adiabatic limit: the geometric phase approaches the Berry values with
// deviation falling like 1/n.
inline CriterionResult criterion_adiabatic_limit() {
    return detail::guarded(8, "adiabatic-limit", [](detail::Tracker& t) {
        const std::vector<int> orders{10, 20, 40, 80};
        const auto rows = adiabatic_berry_scan(1.0, 0.25, orders);
        t.require(rows.size() == orders.size(), "scan dropped rows");
        for (std::size_t k = 1; k < rows.size(); ++k) {
            t.require(rows[k].deviation1 < rows[k - 1].deviation1,
                      "deviation from the Berry value must decrease with n");
            t.require(rows[k].deviation2 < rows[k - 1].deviation2,
                      "deviation from the Berry value must decrease with n");
        }
        // Least-squares slope of log(deviation) against log(n).
        for (int state = 0; state < 2; ++state) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (const auto& r : rows) {
                const double x = std::log(static_cast<double>(r.n));
                const double y = std::log(state == 0 ? r.deviation1 : r.deviation2);
                sx += x; sy += y; sxx += x * x; sxy += x * y;
            }
            const double nn = static_cast<double>(rows.size());
            const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
            t.check(std::abs(slope + 1.0), 0.3, "log-log slope of the deviation");
        }
        return "n in {10, 20, 40, 80} at D0 = 0.25 * delta_eps";
    });
}

// 9. Energy bookkeeping: the closed mean-energy expression equals the direct
// expectation value, and the closed dynamical-phase integral matches
// adaptive quadrature.
inline CriterionResult criterion_energy_identities() {
    return detail::guarded(9, "energy-identities", [](detail::Tracker& t) {
        std::mt19937_64 rng(2026082209ull);
        for (int d = 0; d < 100; ++d) {
            const double eps1 = detail::uniform(rng, -1.0, 1.0);
            const ModelParams p{eps1, eps1 + detail::uniform(rng, 0.2, 2.0),
                                detail::uniform(rng, 0.0, 3.0),
                                detail::uniform(rng, 0.1, 3.0),
                                detail::uniform(rng, 0.0, 2.0 * pi)};
            const InitialState s0 = detail::haar_state(rng);
            const double tt = detail::uniform(rng, 0.0, 10.0);
            const double tau = detail::uniform(rng, 0.2, 15.0);
            const Vec2 psi = bare_state_closed(p, s0, tt);
            const double direct = std::real(dot(psi, hamiltonian_at(p, tt) * psi));
            t.check(std::abs(mean_energy(p, s0, tt) - direct), 1e-11,
                    "closed mean energy vs direct expectation");
            const double closed = dynamical_phase(p, s0, tau);
            const double quad = dynamical_phase_quadrature(p, s0, tau, 1e-12);
            t.check(std::abs(closed - quad), 1e-9,
                    "closed dynamical phase vs quadrature");
        }
        return "100 random models, states, and times";
    });
}

// 10. Regime solvers: impossible loci are rejected, and solvable ones
// round-trip back onto the requested ratio to near machine precision.
inline CriterionResult criterion_regime_solvers() {
    return detail::guarded(10, "regime-solvers", [](detail::Tracker& t) {
        using detail::expect_throw;
        expect_throw<no_solution>(t, "n = 1 below resonance (exact)", [] {
            coupling_for_integer({1.0, -0.01, 1.0, RegimeForm::exact});
        });
        expect_throw<no_solution>(t, "n = 1 below resonance (first order)", [] {
            coupling_for_integer({1.0, -0.01, 1.0, RegimeForm::first_order});
        });
        expect_throw<no_solution>(t, "m = 1/2 (exact)", [] {
            coupling_for_half_integer({1.0, 0.01, 0.5, RegimeForm::exact});
        });
        expect_throw<no_solution>(t, "m = 1/2 (first order)", [] {
            coupling_for_half_integer({1.0, 0.01, 0.5, RegimeForm::first_order});
        });
        expect_throw<no_solution>(t, "Rabi period n = 2 (exact)", [] {
            coupling_for_rabi_period({1.0, 0.05, 2.0, RegimeForm::exact});
        });
        expect_throw<no_solution>(t, "Rabi period n = 2 (first order)", [] {
            coupling_for_rabi_period({1.0, 0.05, 2.0, RegimeForm::first_order});
        });
        expect_throw<no_solution>(t, "Rabi period n = 1 below resonance", [] {
            coupling_for_rabi_period({1.0, -0.05, 1.0, RegimeForm::exact});
        });

        const auto roundtrip = [&](const CouplingResult& cr, double omega,
                                   double target, const std::string& what) {
            const ModelParams p{0.0, 1.0, cr.d0, omega, 0.0};
            t.check(std::abs(rabi(p).gamma / p.omega - target), 1e-12 * target,
                    what);
        };
        roundtrip(coupling_for_integer({1.0, 0.0, 2.0, RegimeForm::exact}), 1.0,
                  2.0, "integer locus round trip");
        roundtrip(coupling_for_half_integer({1.0, 0.0, 1.5, RegimeForm::exact}),
                  1.0, 1.5, "half-integer locus round trip");
        roundtrip(coupling_for_rabi_period({1.0, 0.2, 1.0, RegimeForm::exact}),
                  1.2, 1.0, "Rabi-period locus round trip");

        const double exact =
            coupling_for_integer({1.0, 0.04, 1.0, RegimeForm::exact}).d0;
        const double first =
            coupling_for_integer({1.0, 0.04, 1.0, RegimeForm::first_order}).d0;
        t.check(std::abs(first - exact) / exact, 0.05,
                "first-order coupling vs exact near resonance");
        return "rejections, exact round trips, first-order consistency";
    });
}

// Criteria 1-10; the CLI determinism criterion needs a built binary and
// lives in the acceptance runner instead.
inline std::vector<CriterionResult> run_acceptance() {
    return {criterion_oracle_agreement(), criterion_unitarity(),
            criterion_integer_locus(),    criterion_half_integer_locus(),
            criterion_generic_period(),   criterion_rabi_period(),
            criterion_commensurate(),     criterion_adiabatic_limit(),
            criterion_energy_identities(), criterion_regime_solvers()};
}

} // namespace aaphase
