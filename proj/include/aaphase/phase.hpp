// phase.hpp -- cyclic-evolution detection and the three phases (global,
// dynamical, Aharonov-Anandan), by definition and by every closed formula.
//
// A cyclic evolution |psi(tau)> = e^{i phi} |psi(0)> splits its global phase
// into a dynamical part (the energy-expectation integral) and the geometric
// remainder beta = phi + dyn.  The reference pipeline is aa_phase_numeric
// (overlap argument + closed-form dynamical integral); every closed-form
// branch below is validated against it in the test suite.
//
// Phase bookkeeping: phi, dyn, beta are stored unwrapped exactly as the
// closed formulas produce them (they satisfy beta = phi + dyn as plain
// reals); comparisons are mod 2pi; the principal value (-pi, pi] is for
// display only.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "errors.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "propagator.hpp"

namespace aaphase {

enum class Branch {
    integer_n,
    half_integer_m,
    generic_T_plus,
    generic_T_minus,
    rabi_n1,
    rabi_gamma0,
    rabi_gamma_omega,
    commensurate,
    numeric,
};

inline const char* to_string(Branch b) {
    switch (b) {
        case Branch::integer_n: return "integer-n";
        case Branch::half_integer_m: return "half-integer-m";
        case Branch::generic_T_plus: return "generic-T-plus";
        case Branch::generic_T_minus: return "generic-T-minus";
        case Branch::rabi_n1: return "rabi-n1";
        case Branch::rabi_gamma0: return "rabi-gamma0";
        case Branch::rabi_gamma_omega: return "rabi-gamma-omega";
        case Branch::commensurate: return "commensurate";
        case Branch::numeric: return "numeric";
    }
    return "?";
}

// Wrap an angle to the principal interval (-pi, pi].
inline double principal_angle(double x) {
    double y = std::remainder(x, 2.0 * pi);
    if (y <= -pi) y += 2.0 * pi;
    return y;
}

// Distance between two angles on the circle, in [0, pi].
inline double angle_diff(double a, double b) {
    return std::abs(principal_angle(a - b));
}

/// A certified cyclic evolution: at time tau the state returns to itself up
// to the global phase phi (= arg of the overlap, principal value).
struct CyclicSolution {
    double tau;
    InitialState s0;
    double phi;
    double fidelity_defect;  // 1 - |<psi(0)|psi(tau)>|, <= 1e-9 when emitted
};

struct PhaseRecord {
    double phi;        // global phase (unwrapped on formula branches)
    double dyn;        // dynamical phase, integral of <H> over [0, tau]
    double beta;       // Aharonov-Anandan phase = phi + dyn
    Branch branch;
    double gamma_aux;  // the auxiliary phase (gamma, gamma-tilde, or gamma')
};

namespace detail {

// Population difference and the |c1| (c2 e^{-i d1} + c2* e^{i d1}) cross term
// that every beta formula is written in.
struct BetaTerms {
    double population;  // |c2(0)|^2 - |c1(0)|^2
    double cross;
};

inline BetaTerms beta_terms(const InitialState& s0) {
    const cplx e_min = std::polar(1.0, -s0.delta1);
    const double cross =
        std::abs(s0.c1_0) * std::real(s0.c2_0 * e_min + std::conj(s0.c2_0) / e_min);
    return {std::norm(s0.c2_0) - std::norm(s0.c1_0), cross};
}

// Shared shape of the drive-period beta formulas at Gamma = N*omega
// (N integer or half-odd-integer) and of the Rabi-period N=1 case:
//   lead - (pi/cos th)(de/w)[ P (1 - sin^2 th/4N^2)
//                             + (sin th/2N) sqrt(1 - sin^2 th/4N^2) cross ].
inline double beta_order_formula(const ModelParams& p, double order,
                                 const InitialState& s0, double lead) {
    const EffectiveField f = polar_decomposition(p);
    const BetaTerms bt = beta_terms(s0);
    const double s2 = f.sin_theta * f.sin_theta;
    const double reduced = 1.0 - s2 / (4.0 * order * order);
    return lead - (pi / f.cos_theta) * (p.delta_eps() / p.omega) *
                      (bt.population * reduced +
                       (f.sin_theta / (2.0 * order)) * std::sqrt(reduced) * bt.cross);
}

} // namespace detail

// Expectation value of the energy at time t, evaluated from the closed-form
// expression (population difference plus Rabi-oscillating cross terms); it
// must agree with <psi(t)|H(t)|psi(t)> computed by brute force to 1e-11.
inline double mean_energy(const ModelParams& p, const InitialState& s0, double t) {
    const EffectiveField f = polar_decomposition(p);
    const Spectrum sp = spectrum(p);
    const double gamma = rabi(p).gamma;
    const double w = p.omega;
    const double woverg = w / gamma;
    const double s2 = f.sin_theta * f.sin_theta;
    const detail::BetaTerms bt = detail::beta_terms(s0);
    // The sin(2 Gamma t) term carries i/2 * (c2 e^{-i d1} - c2* e^{i d1}),
    // which is real; evaluate it as written and keep the real part.
    const cplx e_min = std::polar(1.0, -s0.delta1);
    const cplx anti = s0.c2_0 * e_min - std::conj(s0.c2_0) / e_min;
    const double osc =
        std::real(cplx(0.0, 0.5) * woverg * f.sin_theta * std::abs(s0.c1_0) *
                  std::sin(2.0 * gamma * t) * anti);
    const double sin_g = std::sin(gamma * t);
    const double sq = std::sqrt(1.0 - 0.25 * woverg * woverg * s2);
    return 0.5 * (p.eps1 + p.eps2) +
           sp.etilde2 *
               (bt.population + osc +
                sin_g * sin_g *
                    (-0.5 * woverg * woverg * bt.population * s2 +
                     woverg * f.sin_theta * sq * bt.cross));
}

// Integral of mean_energy over [0, tau] via the closed antiderivative
// (int sin^2 = tau/2 - sin(2 G tau)/4G, int sin(2 G t) = (1 - cos(2 G tau))/2G).
inline double dynamical_phase(const ModelParams& p, const InitialState& s0,
                              double tau) {
    const EffectiveField f = polar_decomposition(p);
    const Spectrum sp = spectrum(p);
    const double gamma = rabi(p).gamma;
    const double woverg = p.omega / gamma;
    const double s2 = f.sin_theta * f.sin_theta;
    const detail::BetaTerms bt = detail::beta_terms(s0);
    const cplx e_min = std::polar(1.0, -s0.delta1);
    const cplx anti = s0.c2_0 * e_min - std::conj(s0.c2_0) / e_min;
    const double int_osc =
        std::real(cplx(0.0, 0.5) * woverg * f.sin_theta * std::abs(s0.c1_0) * anti) *
        (1.0 - std::cos(2.0 * gamma * tau)) / (2.0 * gamma);
    const double int_sin2 = 0.5 * tau - std::sin(2.0 * gamma * tau) / (4.0 * gamma);
    const double sq = std::sqrt(1.0 - 0.25 * woverg * woverg * s2);
    return 0.5 * (p.eps1 + p.eps2) * tau +
           sp.etilde2 *
               (bt.population * tau + int_osc +
                int_sin2 * (-0.5 * woverg * woverg * bt.population * s2 +
                            woverg * f.sin_theta * sq * bt.cross));
}

namespace detail {

inline double simpson_recurse(const ModelParams& p, const InitialState& s0, double a,
                              double fa, double m, double fm, double b, double fb,
                              double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = mean_energy(p, s0, lm), frm = mean_energy(p, s0, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_recurse(p, s0, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(p, s0, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive-quadrature evaluation of the dynamical phase; the oracle the
// closed antiderivative is tested against.
inline double dynamical_phase_quadrature(const ModelParams& p, const InitialState& s0,
                                         double tau, double tol = 1e-12) {
    if (tau == 0.0) return 0.0;
    // Split at Rabi-period scale so the oscillatory integrand is resolved
    // before adaptivity starts.
    const double t_rabi = rabi(p).t_rabi;
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(tau) / t_rabi)));
    double total = 0.0;
    for (int k = 0; k < pieces; ++k) {
        const double a = tau * static_cast<double>(k) / pieces;
        const double b = tau * static_cast<double>(k + 1) / pieces;
        const double m = 0.5 * (a + b);
        const double fa = mean_energy(p, s0, a), fm = mean_energy(p, s0, m),
                     fb = mean_energy(p, s0, b);
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += detail::simpson_recurse(p, s0, a, fa, m, fm, b, fb, whole,
                                         tol / pieces, 48);
    }
    return total;
}

// Propagate to tau and test |psi(tau)> = e^{i phi} |psi(0)>.  Certifies the
// GIVEN tau only; scanning for unknown cyclic times is out of scope.
inline std::optional<CyclicSolution> detect_cyclic(const ModelParams& p,
                                                   const InitialState& s0, double tau,
                                                   double tol) {
    if (!(tau > 0.0)) throw config_error("cyclicity detection needs tau > 0");
    const Vec2 psi0 = bare_state_closed(p, s0, 0.0);
    const Vec2 psit = bare_state_closed(p, s0, tau);
    const cplx z = dot(psi0, psit);
    const double defect = 1.0 - std::abs(z);
    if (defect > tol) return std::nullopt;
    return CyclicSolution{tau, s0, std::arg(z), defect};
}

// Reference pipeline: global phase from the overlap argument, dynamical
// phase from the closed integral, beta as their sum.  Every closed-form
// branch is checked against this.
inline PhaseRecord aa_phase_numeric(const ModelParams& p, const InitialState& s0,
                                    double tau) {
    const auto cyc = detect_cyclic(p, s0, tau, 1e-9);
    if (!cyc) {
        const Vec2 psi0 = bare_state_closed(p, s0, 0.0);
        const Vec2 psit = bare_state_closed(p, s0, tau);
        const double defect = 1.0 - std::abs(dot(psi0, psit));
        throw not_cyclic("state is not cyclic at tau = " + std::to_string(tau) +
                             " (fidelity defect " + std::to_string(defect) + ")",
                         defect);
    }
    const double dyn = dynamical_phase(p, s0, tau);
    return {cyc->phi, dyn, cyc->phi + dyn, Branch::numeric,
            cyc->phi + 0.5 * (p.eps1 + p.eps2 + p.omega) * tau};
}

// ---------------------------------------------------------------------------
// Closed-form branches at tau = T (drive period).
// ---------------------------------------------------------------------------

// Gamma = n*omega: every initial state is cyclic at T with the same global
// phase phi = -pi - (eps1+eps2)T/2; beta depends on the state.
inline PhaseRecord case_integer_n(const ModelParams& p, int n, const InitialState& s0) {
    if (n < 1) throw config_error("integer order n must be >= 1");
    const RabiData rd = rabi(p);
    const double ratio = rd.gamma / p.omega;
    if (std::abs(rd.gamma - n * p.omega) > 1e-10 * p.omega)
        throw constraint_mismatch("Gamma != n*omega (Gamma/omega = " +
                                      std::to_string(ratio) + ", n = " +
                                      std::to_string(n) + ")",
                                  ratio);
    const double T = rd.t_field;
    const double phi = -pi - 0.5 * (p.eps1 + p.eps2) * T;
    const double beta = detail::beta_order_formula(p, n, s0, -pi);
    return {phi, dynamical_phase(p, s0, T), beta, Branch::integer_n, -pi};
}

// Gamma = m*omega with m half-odd-integer (m >= 3/2; m = 1/2 is unreachable
// because Gamma > omega/2 always): phi = -(eps1+eps2)T/2, and beta has the
// same shape as the integer case up to a pi shift.
inline PhaseRecord case_half_integer_m(const ModelParams& p, double m,
                                       const InitialState& s0) {
    const double twice = 2.0 * m;
    if (std::abs(twice - std::round(twice)) > 1e-9 ||
        static_cast<long long>(std::llround(twice)) % 2 == 0 || m < 1.5)
        throw config_error(
            "order m must be half-odd-integer >= 3/2 (m = 1/2 is unreachable: "
            "Gamma > omega/2 always)");
    const RabiData rd = rabi(p);
    const double ratio = rd.gamma / p.omega;
    if (std::abs(rd.gamma - m * p.omega) > 1e-10 * p.omega)
        throw constraint_mismatch("Gamma != m*omega (Gamma/omega = " +
                                      std::to_string(ratio) + ", m = " +
                                      std::to_string(m) + ")",
                                  ratio);
    const double T = rd.t_field;
    const double phi = -0.5 * (p.eps1 + p.eps2) * T;
    const double beta = detail::beta_order_formula(p, m, s0, 0.0);
    return {phi, dynamical_phase(p, s0, T), beta, Branch::half_integer_m, 0.0};
}

// Solvability matrix for cyclicity at tau = T in the eigenbasis, as a
// function of the auxiliary phase gamma = phi + (eps1+eps2)T/2, together
// with its closed-form determinant Gamma^2 Etilde2^2 (1 + 2 cos(Gamma T)
// e^{i gamma} + e^{2 i gamma}).
struct DetM {
    cplx value;  // closed-form determinant
    Mat2 m;
};

inline DetM det_M(const ModelParams& p, double gamma_phase) {
    const Spectrum sp = spectrum(p);
    const RabiData rd = rabi(p);
    const double gt = rd.gamma * rd.t_field;
    const cplx eig = std::polar(1.0, gamma_phase);
    const cplx i(0.0, 1.0);
    const cplx diag_re = rd.gamma * sp.etilde2 * (std::cos(gt) + eig);
    const cplx diag_im =
        i * std::sin(gt) * (sp.etilde2 * sp.etilde2 + 0.25 * p.omega * p.delta_eps());
    const cplx off = -i * 0.5 * p.omega * p.d0 * std::sin(gt);
    const Mat2 m{diag_re + diag_im, off, off, diag_re - diag_im};
    const double scale = rd.gamma * rd.gamma * sp.etilde2 * sp.etilde2;
    const cplx closed =
        scale * (1.0 + 2.0 * std::cos(gt) * eig + eig * eig);
    if (std::abs(closed - det(m)) > 1e-10 * scale)
        throw internal_error("det(M) closed form disagrees with matrix determinant");
    return {closed, m};
}

// Same machinery in the bare basis for arbitrary return time tau, as a
// function of gamma_tilde = phi + (eps1+eps2+omega)tau/2.  At tau = T_Gamma
// the determinant also has a factored real/imaginary form, returned when
// applicable and checked against the general expression.
struct DetMtilde {
    cplx value;                    // closed-form determinant
    Mat2 m;
    std::optional<cplx> factored;  // tau = T_Gamma only
};

inline DetMtilde det_Mtilde(const ModelParams& p, double gamma_tilde, double tau) {
    const EffectiveField f = polar_decomposition(p);
    const Spectrum sp = spectrum(p);
    const RabiData rd = rabi(p);
    const double g = rd.gamma;
    const double a = sp.etilde2 - 0.5 * p.omega * f.cos_theta;
    const double b = 0.5 * p.omega * f.sin_theta;
    const double sh = f.sin_half, ch = f.cos_half;
    const double C = std::cos(g * tau);
    const double K = std::sin(g * tau) / g;
    const cplx i(0.0, 1.0);
    const cplx u = std::polar(1.0, gamma_tilde);
    const cplx v = std::polar(1.0, gamma_tilde - p.omega * tau);
    const cplx pterm = i * K * (a * sh + b * ch);
    const cplx qterm = i * K * (a * ch - b * sh);
    const Mat2 m{sh * (u - C) - pterm, -ch * (u - C) - qterm,
                 ch * (C - v) + qterm, sh * (C - v) - pterm};

    const cplx closed = -1.0 + (C * (u + v) - u * v) -
                        i * (std::sin(g * tau) / (2.0 * g)) *
                            (p.omega + p.delta_eps()) * (u - v);
    if (std::abs(closed - det(m)) > 1e-10)
        throw internal_error("det(Mtilde) closed form disagrees with matrix determinant");

    std::optional<cplx> factored;
    if (std::abs(tau - rd.t_rabi) <= 1e-12 * rd.t_rabi) {
        // Real/imaginary split valid at the Rabi period, gamma' = gamma_tilde:
        //   2 sin(g'/2) { [-sin(g'/2) + sin(3g'/2 - w T_G)]
        //                 + 2i sin((g' - w T_G)/2) sin(g' - w T_G/2) }.
        const double gp = gamma_tilde;
        const double wt = p.omega * rd.t_rabi;
        const cplx inner =
            cplx(-std::sin(0.5 * gp) + std::sin(1.5 * gp - wt), 0.0) +
            2.0 * i * std::sin(0.5 * (gp - wt)) * std::sin(gp - 0.5 * wt);
        factored = 2.0 * std::sin(0.5 * gp) * inner;
        if (std::abs(*factored - closed) > 1e-10)
            throw internal_error("factored det(Mtilde) disagrees at tau = T_Gamma");
    }
    return {closed, m, factored};
}

namespace detail {

// Extract a unit null vector of a (nearly) singular 2x2 matrix: take the
// larger-norm adjugate column, falling back to the minimal singular
// direction when both columns collapse; fix the phase so c1 is real >= 0
// (or c2 when c1 vanishes).
inline Vec2 null_direction(const Mat2& m) {
    const SingularValues sv = singular_values(m);
    if (sv.max < 1e-9)
        throw degenerate_nullspace(
            "both singular values vanish: the cyclic initial state is not unique");
    const Vec2 col1{m.a22, -m.a21};
    const Vec2 col2{-m.a12, m.a11};
    Vec2 v = norm2(col1) >= norm2(col2) ? col1 : col2;
    if (norm(v) < 1e-12) {
        // Near a double root both adjugate columns die; use the eigenvector
        // of m^H m belonging to the smaller singular value instead.
        const Mat2 g = adjoint(m) * m;
        const double lam = sv.min * sv.min;
        const Vec2 w1{g.a12, lam - g.a11};
        const Vec2 w2{lam - g.a22, g.a21};
        v = norm2(w1) >= norm2(w2) ? w1 : w2;
    }
    const double n = norm(v);
    if (n == 0.0) throw degenerate_nullspace("null direction collapsed to zero");
    v = (1.0 / n) * v;
    const cplx anchor = std::abs(v.x) > 1e-12 ? v.x : v.y;
    v = std::polar(1.0, -std::arg(anchor)) * v;
    return v;
}

} // namespace detail

// Generic Gamma/omega (no half-integer coincidence): only two special
// initial states are cyclic at tau = T, one per root gamma = pi +/- Gamma*T
// of det(M) = 0.  delta1 multiplies the emitted state by a global phase;
// beta is provably independent of it (tested, not assumed).
inline std::pair<CyclicSolution, PhaseRecord> case_generic_T(const ModelParams& p,
                                                             int sign,
                                                             double delta1 = 0.0) {
    if (sign != 1 && sign != -1) throw config_error("sign must be +1 or -1");
    const RabiData rd = rabi(p);
    const double ratio = rd.gamma / p.omega;
    if (std::abs(ratio - 0.5 * std::round(2.0 * ratio)) <= 1e-8)
        throw constraint_mismatch(
            "Gamma/omega is half-integer; use the integer/half-integer branch "
            "(Gamma/omega = " + std::to_string(ratio) + ")",
            ratio);
    const Spectrum sp = spectrum(p);
    const double T = rd.t_field;
    // Null state of M at gamma = pi + sign*Gamma*T; bracket pairs with the
    // opposite sign of Gamma.
    const double bracket = sp.etilde2 * (sp.etilde2 - sign * rd.gamma) +
                           0.25 * p.omega * p.delta_eps();
    const double nrm = std::hypot(p.omega * p.d0, 2.0 * bracket);
    const cplx phase = std::polar(1.0, delta1);
    const InitialState s0 = make_initial_state(phase * (p.omega * p.d0 / nrm),
                                               phase * (2.0 * bracket / nrm));
    const double gamma_phase = pi + sign * rd.gamma * T;
    const double phi = gamma_phase - 0.5 * (p.eps1 + p.eps2) * T;

    // The emitted state must actually solve the cyclicity system.
    const DetM dm = det_M(p, gamma_phase);
    const double scale = rd.gamma * rd.gamma * sp.etilde2 * sp.etilde2;
    if (std::abs(dm.value) > 1e-10 * scale)
        throw internal_error("det(M) does not vanish at gamma = pi +/- Gamma*T");
    const auto cyc = detect_cyclic(p, s0, T, 1e-9);
    if (!cyc) throw internal_error("generic-T special state failed cyclicity check");

    const EffectiveField f = polar_decomposition(p);
    const detail::BetaTerms bt = detail::beta_terms(s0);
    const double woverg = p.omega / rd.gamma;
    const double s2 = f.sin_theta * f.sin_theta;
    const double sin2gt = std::sin(2.0 * rd.gamma * T);
    const double pop_factor =
        1.0 - 0.25 * woverg * woverg * s2 * (1.0 - woverg / (4.0 * pi) * sin2gt);
    const double cross_factor = woverg * (0.5 - woverg / (8.0 * pi) * sin2gt) *
                                f.sin_theta *
                                std::sqrt(1.0 - 0.25 * woverg * woverg * s2);
    const double beta =
        gamma_phase - (pi / f.cos_theta) * (p.delta_eps() / p.omega) *
                          (bt.population * pop_factor + cross_factor * bt.cross);
    const Branch br = sign > 0 ? Branch::generic_T_plus : Branch::generic_T_minus;
    return {*cyc, {phi, dynamical_phase(p, s0, T), beta, br, gamma_phase}};
}

// Commensurate ratio Gamma/omega = m/2n: EVERY initial state is cyclic at
// tau = nT, with the state-independent global phase
// phi = -(eps1+eps2) nT/2 + pi (m - n).
struct CommensurateResult {
    double tau;
    double phi;
};

inline CommensurateResult commensurate(const ModelParams& p, int m, int n) {
    if (m < 1 || n < 1) throw config_error("commensurate orders must be >= 1");
    const RabiData rd = rabi(p);
    const double ratio = rd.gamma / p.omega;
    const double target = static_cast<double>(m) / (2.0 * n);
    if (std::abs(ratio - target) > 1e-10)
        throw constraint_mismatch("Gamma/omega != m/2n (Gamma/omega = " +
                                      std::to_string(ratio) + ", m/2n = " +
                                      std::to_string(target) + ")",
                                  ratio);
    const double tau = n * rd.t_field;
    return {tau, -0.5 * (p.eps1 + p.eps2) * tau + pi * (m - n)};
}

// Commensurate branch for one concrete state: certifies cyclicity and packs
// a PhaseRecord (beta = phi + dyn; there is no separate closed beta formula
// on this branch).
inline std::pair<CyclicSolution, PhaseRecord> commensurate_with_state(
    const ModelParams& p, int m, int n, const InitialState& s0) {
    const CommensurateResult cr = commensurate(p, m, n);
    const auto cyc = detect_cyclic(p, s0, cr.tau, 1e-9);
    if (!cyc) throw internal_error("commensurate evolution failed cyclicity check");
    const double dyn = dynamical_phase(p, s0, cr.tau);
    return {*cyc,
            {cr.phi, dyn, cr.phi + dyn, Branch::commensurate, pi * (m - n)}};
}

// ---------------------------------------------------------------------------
// Closed-form branches at tau = T_Gamma (Rabi period).
// ---------------------------------------------------------------------------

// Gamma = omega: the Rabi period equals the drive period and every state is
// cyclic at T_Gamma; phi = -(eps1+eps2)T_Gamma/2 - pi.
inline PhaseRecord rabi_cycle_n1(const ModelParams& p, const InitialState& s0) {
    const RabiData rd = rabi(p);
    const double ratio = rd.gamma / p.omega;
    if (std::abs(rd.gamma - p.omega) > 1e-10 * p.omega)
        throw constraint_mismatch(
            "Gamma != omega (Gamma/omega = " + std::to_string(ratio) + ")", ratio);
    const double tau = rd.t_rabi;
    const double phi = -0.5 * (p.eps1 + p.eps2) * tau - pi;
    const double beta = detail::beta_order_formula(p, 1.0, s0, -pi);
    return {phi, dynamical_phase(p, s0, tau), beta, Branch::rabi_n1, 0.0};
}

// T_Gamma != nT: only two special states are cyclic at the Rabi period, one
// per root gamma' = 0 and gamma' = omega*T_Gamma of det(Mtilde) = 0.  The
// state is the null direction of the assembled matrix (not a quoted
// formula), phase-fixed so c1(0) is real >= 0.
inline std::pair<CyclicSolution, PhaseRecord> rabi_cycle_special(const ModelParams& p,
                                                                 Branch which) {
    if (which != Branch::rabi_gamma0 && which != Branch::rabi_gamma_omega)
        throw config_error("rabi_cycle_special expects rabi-gamma0 or rabi-gamma-omega");
    const RabiData rd = rabi(p);
    const double ratio = rd.gamma / p.omega;
    // Gamma > omega/2 always, so T_Gamma = nT can only happen at n = 1.
    if (std::abs(ratio - 1.0) <= 1e-8)
        throw constraint_mismatch(
            "T_Gamma coincides with T (Gamma = omega); use the rabi-n1 branch", ratio);
    const double tau = rd.t_rabi;
    const double wt = p.omega * tau;
    const double gamma_prime = which == Branch::rabi_gamma0 ? 0.0 : wt;

    const DetMtilde dm = det_Mtilde(p, gamma_prime, tau);
    if (std::abs(dm.value) > 1e-9)
        throw internal_error("det(Mtilde) does not vanish at the advertised root");
    const Vec2 v = detail::null_direction(dm.m);
    const InitialState s0 = make_initial_state(v.x, v.y);

    const double phi = gamma_prime - 0.5 * (p.eps1 + p.eps2 + p.omega) * tau;
    const auto cyc = detect_cyclic(p, s0, tau, 1e-9);
    if (!cyc) throw internal_error("Rabi-period special state failed cyclicity check");

    const EffectiveField f = polar_decomposition(p);
    const detail::BetaTerms bt = detail::beta_terms(s0);
    const double woverg = p.omega / rd.gamma;
    const double s2 = f.sin_theta * f.sin_theta;
    const double reduced = 1.0 - 0.25 * woverg * woverg * s2;
    const double lead = (which == Branch::rabi_gamma0 ? -1.0 : 1.0) * pi * woverg;
    const double beta =
        lead - (pi / f.cos_theta) * woverg * (p.delta_eps() / p.omega) *
                   (bt.population * reduced +
                    0.5 * woverg * f.sin_theta * std::sqrt(reduced) * bt.cross);
    return {*cyc, {phi, dynamical_phase(p, s0, tau), beta, which, gamma_prime}};
}

} // namespace aaphase
