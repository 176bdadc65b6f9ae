// regimes.hpp -- coupling/frequency constraint solvers and the adiabatic
// Berry-limit scan.
//
// The closed-form phase branches live on loci in parameter space
// (Gamma = n*omega, Gamma = m*omega, Gamma = omega/n); these helpers solve
// for the coupling D0 that puts the model on a requested locus, either
// exactly or to first order in the detuning delta = omega - delta_eps.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "phase.hpp"

namespace aaphase {

enum class RegimeForm { exact, first_order };

// A coupling query: level splitting, detuning (omega = delta_eps + delta),
// target order, and which form of the solution is wanted.  The first-order
// form is only meaningful in quasi-resonance; |delta/delta_eps| <= 0.1 is
// enforced and anything above 0.01 is flagged.
struct RegimeQuery {
    double delta_eps;
    double delta;
    double order;
    RegimeForm form = RegimeForm::exact;
};

struct CouplingResult {
    double d0;
    RegimeForm form;
    bool detuning_warning;  // first-order requested with |delta/delta_eps| > 0.01
};

namespace detail {

inline void check_query(const RegimeQuery& q) {
    if (!(q.delta_eps > 0.0))
        throw config_error("delta_eps must be positive");
    if (!(q.delta_eps + q.delta > 0.0))
        throw config_error("omega = delta_eps + delta must be positive");
    if (q.form == RegimeForm::first_order &&
        std::abs(q.delta / q.delta_eps) > 0.1)
        throw config_error(
            "first-order form requires quasi-resonance |delta/delta_eps| <= 0.1");
}

inline bool warn_detuning(const RegimeQuery& q) {
    return q.form == RegimeForm::first_order &&
           std::abs(q.delta / q.delta_eps) > 0.01;
}

// Exact solution of Gamma = target_ratio * omega for D0:
//   D0^2 = target^2 omega^2 - (delta_eps + omega)^2 / 4.
inline double exact_coupling(const RegimeQuery& q, double target_ratio,
                             const std::string& what) {
    const double omega = q.delta_eps + q.delta;
    const double d0sq = target_ratio * target_ratio * omega * omega -
                        0.25 * std::pow(q.delta_eps + omega, 2);
    if (d0sq < 0.0)
        throw no_solution(what + ": no real coupling exists (D0^2 = " +
                          std::to_string(d0sq) + " < 0)");
    return std::sqrt(d0sq);
}

// Quasi-resonant first-order solution (D0/delta_eps)^2 = c0 + c1*(delta/delta_eps).
inline double first_order_coupling(const RegimeQuery& q, double c0, double c1,
                                   const std::string& what) {
    const double x = c0 + c1 * (q.delta / q.delta_eps);
    if (x < 0.0)
        throw no_solution(what + ": first-order (D0/delta_eps)^2 = " +
                          std::to_string(x) + " < 0");
    return q.delta_eps * std::sqrt(x);
}

} // namespace detail

// Coupling putting the model on Gamma = n*omega.  For n = 1 this needs
// delta > 0 (otherwise D0^2 < 0); first-order coefficients (n^2 - 1) and
// (2n^2 - 1).
inline CouplingResult coupling_for_integer(const RegimeQuery& q) {
    detail::check_query(q);
    const double n = q.order;
    if (!(n >= 1.0) || std::abs(n - std::round(n)) > 1e-9)
        throw config_error("integer order n must be a positive integer");
    const double d0 =
        q.form == RegimeForm::exact
            ? detail::exact_coupling(q, n, "Gamma = n*omega with n = " +
                                               std::to_string(static_cast<int>(n)))
            : detail::first_order_coupling(
                  q, n * n - 1.0, 2.0 * n * n - 1.0,
                  "Gamma = n*omega with n = " + std::to_string(static_cast<int>(n)));
    return {d0, q.form, detail::warn_detuning(q)};
}

// Coupling putting the model on Gamma = m*omega, m half-odd-integer.
// m = 1/2 never has a solution: Gamma >= (delta_eps + omega)/2 > omega/2.
inline CouplingResult coupling_for_half_integer(const RegimeQuery& q) {
    detail::check_query(q);
    const double m = q.order;
    const double twice = 2.0 * m;
    if (!(m > 0.0) || std::abs(twice - std::round(twice)) > 1e-9 ||
        static_cast<long long>(std::llround(twice)) % 2 == 0)
        throw config_error("order m must be half-odd-integer (1/2, 3/2, ...)");
    const std::string what = "Gamma = m*omega with m = " + std::to_string(m);
    const double d0 = q.form == RegimeForm::exact
                          ? detail::exact_coupling(q, m, what)
                          : detail::first_order_coupling(q, m * m - 1.0,
                                                         2.0 * m * m - 1.0, what);
    return {d0, q.form, detail::warn_detuning(q)};
}

// Coupling making the Rabi period an integer multiple of the drive period,
// T_Gamma = n*T i.e. Gamma = omega/n.  Solvable only for n = 1 with
// delta >= 0; every n >= 2 fails because Gamma > omega/2 always.
inline CouplingResult coupling_for_rabi_period(const RegimeQuery& q) {
    detail::check_query(q);
    const double n = q.order;
    if (!(n >= 1.0) || std::abs(n - std::round(n)) > 1e-9)
        throw config_error("integer order n must be a positive integer");
    const std::string what =
        "T_Gamma = n*T with n = " + std::to_string(static_cast<int>(n));
    const double d0 =
        q.form == RegimeForm::exact
            ? detail::exact_coupling(q, 1.0 / n, what)
            : detail::first_order_coupling(q, 1.0 / (n * n) - 1.0,
                                           2.0 / (n * n) - 1.0, what);
    return {d0, q.form, detail::warn_detuning(q)};
}

// One row of the adiabatic convergence study: at fixed physical coupling,
// the drive frequency omega_n solving Gamma = n*omega shrinks as n grows and
// the Aharonov-Anandan phase approaches the Berry phase of the corresponding
// eigenstate, -pi(1 + cos theta) for s0 = (1,0) and -pi(1 - cos theta) for
// s0 = (0,1), with deviation O(1/n).
struct BerryRow {
    int n;
    double omega_n;
    double theta;
    double beta1;       // beta mod 2pi, s0 = (1,0)
    double beta2;       // beta mod 2pi, s0 = (0,1)
    double deviation1;  // |beta1 - (-pi(1+cos theta))| on the circle
    double deviation2;  // |beta2 - (-pi(1-cos theta))| on the circle
};

inline std::vector<BerryRow> adiabatic_berry_scan(double delta_eps,
                                                  double d0_over_eps,
                                                  const std::vector<int>& n_list) {
    if (!(delta_eps > 0.0)) throw config_error("delta_eps must be positive");
    if (d0_over_eps < 0.0) throw config_error("d0_over_eps must be non-negative");
    for (std::size_t k = 1; k < n_list.size(); ++k)
        if (n_list[k] <= n_list[k - 1])
            throw config_error("n_list must be strictly increasing");

    const double d0 = d0_over_eps * delta_eps;
    std::vector<BerryRow> rows;
    rows.reserve(n_list.size());
    for (int n : n_list) {
        if (n < 1) throw config_error("orders in n_list must be >= 1");
        // Positive root of (n^2 - 1/4) w^2 - (delta_eps/2) w - (delta_eps^2/4 + D0^2) = 0,
        // i.e. Gamma(w) = n*w; the other root is negative.
        const double a = n * n - 0.25;
        const double half_eps = 0.5 * delta_eps;
        const double c = 0.25 * delta_eps * delta_eps + d0 * d0;
        const double omega_n =
            (half_eps + std::sqrt(half_eps * half_eps + 4.0 * a * c)) / (2.0 * a);
        if (!(omega_n < delta_eps / 5.0))
            throw config_error("adiabatic scan needs omega_n < delta_eps/5; n = " +
                               std::to_string(n) + " gives omega_n = " +
                               std::to_string(omega_n));
        const ModelParams p{0.0, delta_eps, d0, omega_n, 0.0};
        const EffectiveField f = polar_decomposition(p);
        const double beta1 =
            case_integer_n(p, n, make_initial_state(1.0, 0.0)).beta;
        const double beta2 =
            case_integer_n(p, n, make_initial_state(0.0, 1.0)).beta;
        const double target1 = -pi * (1.0 + f.cos_theta);
        const double target2 = -pi * (1.0 - f.cos_theta);
        rows.push_back({n, omega_n, f.theta, principal_angle(beta1),
                        principal_angle(beta2), angle_diff(beta1, target1),
                        angle_diff(beta2, target2)});
    }
    return rows;
}

} // namespace aaphase
