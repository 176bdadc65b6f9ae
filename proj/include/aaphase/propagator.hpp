// propagator.hpp -- exact time evolution of the driven two-level system.
//
// Two independent routes to the same state:
//   * evolve_closed: the closed-form amplitudes in the instantaneous
//     eigenbasis (exact for all parameters, evolution-from-zero convention);
//   * evolve_numeric: a classic RK4 integration of the Schroedinger equation
//     in the bare basis with Richardson step-halving, used as the oracle the
//     closed forms are validated against.
#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "model.hpp"

namespace aaphase {

// Amplitudes (c1(0), c2(0)) in the instantaneous-eigenstate basis at t = 0.
// delta1 is the phase of c1(0), kept explicitly because several closed
// formulas are written in terms of |c1(0)| and delta1.
struct InitialState {
    cplx c1_0{}, c2_0{};
    double delta1 = 0.0;
};

inline InitialState make_initial_state(cplx c1, cplx c2) {
    const double n2 = std::norm(c1) + std::norm(c2);
    if (std::abs(n2 - 1.0) > 1e-12)
        throw config_error("initial state must be normalized: |c1|^2+|c2|^2 = " +
                           std::to_string(n2));
    return {c1, c2, std::abs(c1) > 0.0 ? std::arg(c1) : 0.0};
}

// State at time t in the eigenbasis.  ctilde_j carry the dynamical phases;
// g_j are the same amplitudes with the common phase e^{-i(eps1+eps2+omega)t/2}
// stripped off, so they are strictly periodic with the Rabi period.
struct AmplitudeState {
    double t;
    cplx ctilde1, ctilde2;
    cplx g1, g2;
};

// Linear core of the closed-form propagator: maps (c1(0), c2(0)) to
// (g1(t), g2(t)).  Valid for unnormalized inputs as well (it is linear),
// which the linearity property test exercises directly.
inline std::pair<cplx, cplx> evolve_g_raw(const ModelParams& p, cplx c1, cplx c2,
                                          double t) {
    const EffectiveField f = polar_decomposition(p);
    const Spectrum sp = spectrum(p);
    const double gamma = rabi(p).gamma;
    const double a = sp.etilde2 - 0.5 * p.omega * f.cos_theta;  // always > 0
    const double b = 0.5 * p.omega * f.sin_theta;
    const double cg = std::cos(gamma * t);
    const double sg = std::sin(gamma * t) / gamma;
    const cplx i(0.0, 1.0);
    return {c1 * cg + i * sg * (a * c1 - b * c2),
            c2 * cg - i * sg * (a * c2 + b * c1)};
}

inline AmplitudeState evolve_closed(const ModelParams& p, const InitialState& s0,
                                    double t) {
    auto [g1, g2] = evolve_g_raw(p, s0.c1_0, s0.c2_0, t);
    const cplx common = std::polar(1.0, -0.5 * (p.eps1 + p.eps2 + p.omega) * t);
    return {t, common * g1, common * g2, g1, g2};
}

enum class BasisDirection { eigen_to_bare, bare_to_eigen };

// Convert between eigenbasis amplitudes and the bare {|1>,|2>} components at
// time t.  The eigenvectors are orthonormal, so the inverse is the adjoint.
inline Vec2 basis_change(const ModelParams& p, const Vec2& state, double t,
                         BasisDirection dir) {
    const Vec2 phi1 = eigenstate_at(p, t, 1);
    const Vec2 phi2 = eigenstate_at(p, t, 2);
    if (dir == BasisDirection::eigen_to_bare) return state.x * phi1 + state.y * phi2;
    return {dot(phi1, state), dot(phi2, state)};
}

// Bare-basis state at time t from the closed-form amplitudes.
inline Vec2 bare_state_closed(const ModelParams& p, const InitialState& s0, double t) {
    const AmplitudeState a = evolve_closed(p, s0, t);
    return basis_change(p, {a.ctilde1, a.ctilde2}, t, BasisDirection::eigen_to_bare);
}

// Result of a numeric integration sampled at the requested times.
struct NumericTrajectory {
    std::vector<Vec2> states;
    double achieved_error;   // sup over samples of the h vs h/2 difference
    std::size_t steps_used;  // RK4 steps in the accepted (finer) pass
};

namespace detail {

// One RK4 pass over the sorted sample times, stepping with target step h and
// landing on every sample exactly.  Throws when the pass would exceed the
// step cap.  last_err is whatever self-consistency estimate is available so
// the failure can report it.
inline std::vector<Vec2> rk4_pass(const ModelParams& p, const Vec2& psi0,
                                  const std::vector<double>& ts, double h,
                                  std::size_t max_steps, double last_err,
                                  std::size_t* steps_out) {
    // d psi/dt = -i H(t) psi, written out for the 2x2 rotating Hamiltonian.
    const cplx i(0.0, 1.0);
    auto rhs = [&](double t, const Vec2& v) -> Vec2 {
        const cplx off = p.d0 * std::polar(1.0, -(p.omega * t - p.phi0));
        return {-i * (p.eps1 * v.x + off * v.y),
                -i * (std::conj(off) * v.x + p.eps2 * v.y)};
    };

    std::size_t total = 0;
    double t_prev = 0.0;
    for (double tk : ts) {
        const double span = std::abs(tk - t_prev);
        total += span > 0.0 ? static_cast<std::size_t>(std::ceil(span / h)) : 0;
        t_prev = tk;
    }
    if (total > max_steps)
        throw integration_failure("integrator step cap exceeded (" +
                                      std::to_string(total) + " > " +
                                      std::to_string(max_steps) +
                                      " steps) before reaching tolerance",
                                  last_err, total);

    std::vector<Vec2> out;
    out.reserve(ts.size());
    Vec2 psi = psi0;
    double t = 0.0;
    std::size_t used = 0;
    for (double tk : ts) {
        const double span = tk - t;
        if (span != 0.0) {
            const auto n = static_cast<std::size_t>(std::ceil(std::abs(span) / h));
            const double hs = span / static_cast<double>(n);
            for (std::size_t k = 0; k < n; ++k) {
                const Vec2 k1 = rhs(t, psi);
                const Vec2 k2 = rhs(t + 0.5 * hs, psi + 0.5 * hs * k1);
                const Vec2 k3 = rhs(t + 0.5 * hs, psi + 0.5 * hs * k2);
                const Vec2 k4 = rhs(t + hs, psi + hs * k3);
                psi = psi + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += hs;
            }
            t = tk;  // kill accumulated rounding in the time variable
            used += n;
        }
        out.push_back(psi);
    }
    *steps_out = used;
    return out;
}

} // namespace detail

// Integrate the Schroedinger equation in the bare basis and return the state
// at each requested time.  Times must be sorted (non-decreasing); the state
// is NOT renormalized along the way -- norm drift is a diagnostic the tests
// inspect.  Step-halving continues until two successive passes agree to tol
// at every sample point, or the step cap trips (integration_failure).
inline NumericTrajectory evolve_numeric_many(const ModelParams& p, const Vec2& psi0,
                                             std::vector<double> ts, double tol,
                                             std::size_t max_steps = (1u << 23)) {
    validate(p);
    if (tol < 1e-13 || tol > 1e-6)
        throw config_error("integrator tol must lie in [1e-13, 1e-6]");
    if (std::abs(norm(psi0) - 1.0) > 1e-9)
        throw config_error("numeric propagation expects a unit-norm state");
    for (std::size_t k = 1; k < ts.size(); ++k)
        if (ts[k] < ts[k - 1])
            throw config_error("sample times must be sorted");
    if (ts.empty()) return {{}, 0.0, 0};

    double h = rabi(p).t_field / 4096.0;  // base step, then Richardson halving
    double last_err = HUGE_VAL;
    std::size_t steps = 0;
    std::vector<Vec2> coarse = detail::rk4_pass(p, psi0, ts, h, max_steps, last_err, &steps);
    for (int halving = 0; halving < 40; ++halving) {
        h *= 0.5;
        std::vector<Vec2> fine =
            detail::rk4_pass(p, psi0, ts, h, max_steps, last_err, &steps);
        double sup = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k)
            sup = std::max(sup, max_abs_diff(coarse[k], fine[k]));
        if (sup <= tol) return {std::move(fine), sup, steps};
        last_err = sup;
        coarse = std::move(fine);
    }
    throw integration_failure("integrator failed to converge", last_err, steps);
}

// Single-time variant of the above.
inline Vec2 evolve_numeric(const ModelParams& p, const Vec2& psi0_bare, double t,
                           double tol, std::size_t max_steps = (1u << 23)) {
    return evolve_numeric_many(p, psi0_bare, {t}, tol, max_steps).states.front();
}

// Max deviation of the stripped amplitudes after n Rabi periods from their
// initial values; they are exactly periodic, so this probes pure rounding.
inline double g_periodicity_check(const ModelParams& p, const InitialState& s0, int n) {
    if (n < 0) throw config_error("period count must be non-negative");
    const double t = static_cast<double>(n) * rabi(p).t_rabi;
    auto [g1, g2] = evolve_g_raw(p, s0.c1_0, s0.c2_0, t);
    return std::max(std::abs(g1 - s0.c1_0), std::abs(g2 - s0.c2_0));
}

} // namespace aaphase
