// model.hpp -- static model data for the driven two-level system in the
// rotating-wave approximation: parameters, effective-field geometry,
// spectrum, instantaneous eigenstates, and the Rabi frequency.
//
// Conventions (natural units, hbar = c = 1):
//   * bare energies eps1 < eps2, level splitting delta_eps = eps2 - eps1;
//   * drive couples through the single scalar D0 >= 0 with phase phi0;
//   * the equivalent magnetic moment is fixed to mu = 1, so the effective
//     field enters all observables only through mu*B = B.
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace aaphase {

inline constexpr double pi = std::numbers::pi;

struct ModelParams {
    double eps1;        // lower bare energy
    double eps2;        // upper bare energy
    double d0;          // dipole-field coupling, >= 0
    double omega;       // drive angular frequency, > 0
    double phi0 = 0.0;  // drive phase (any real; the dynamics is 2pi-periodic in it)

    double delta_eps() const { return eps2 - eps1; }
};

inline void validate(const ModelParams& p) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(p.eps1) || !finite(p.eps2) || !finite(p.d0) || !finite(p.omega) ||
        !finite(p.phi0))
        throw config_error("model parameters must all be finite");
    if (!(p.eps2 > p.eps1))
        throw config_error("eps2 must exceed eps1 (got eps1=" + std::to_string(p.eps1) +
                           ", eps2=" + std::to_string(p.eps2) + ")");
    if (!(p.omega > 0.0))
        throw config_error("omega must be positive (got " + std::to_string(p.omega) + ")");
    if (p.d0 < 0.0)
        throw config_error("d0 must be non-negative (got " + std::to_string(p.d0) + ")");
}

// Fixed tilt geometry of the precessing effective field.  theta lies in
// [pi/2, pi]; the half-angle values are computed algebraically from the
// field components (stable near theta = pi), never from trig of theta/2.
struct EffectiveField {
    double theta;       // polar angle in [pi/2, pi]
    double b_norm;      // |B| = 2*sqrt(D0^2 + (delta_eps/2)^2), with mu = 1
    double cos_half;    // cos(theta/2)
    double sin_half;    // sin(theta/2)
    double cos_theta;   // -(delta_eps/2)/etilde2  (<= 0)
    double sin_theta;   // D0/etilde2              (>= 0)
};

struct Spectrum {
    double e1;          // lower dressed eigenvalue
    double e2;          // upper dressed eigenvalue
    double etilde2;     // sqrt(D0^2 + (delta_eps/2)^2), half the dressed splitting
    double etilde1;     // = -etilde2
};

struct RabiData {
    double gamma;       // Rabi frequency, sqrt(D0^2 + (delta_eps+omega)^2/4)
    double t_field;     // drive period 2pi/omega
    double t_rabi;      // Rabi period 2pi/gamma
};

struct DipoleCoupling {
    double d0;          // |d12 . e0|
    double phi0_shift;  // 0 if the dot product is >= 0, pi otherwise
};

// Reduce the transition-dipole and field vectors to the scalar coupling,
// absorbing a negative sign into the drive phase.
inline DipoleCoupling dipole_coupling(const std::array<double, 3>& d12,
                                      const std::array<double, 3>& e0) {
    for (double v : d12)
        if (!std::isfinite(v)) throw config_error("d12 components must be finite");
    for (double v : e0)
        if (!std::isfinite(v)) throw config_error("e0 components must be finite");
    const double proj = d12[0] * e0[0] + d12[1] * e0[1] + d12[2] * e0[2];
    return {std::abs(proj), proj >= 0.0 ? 0.0 : pi};
}

// Effective magnetic field at time t: a vector of constant norm precessing
// about z at the drive frequency, with constant z-component -delta_eps.
inline std::array<double, 3> effective_field_at(const ModelParams& p, double t) {
    validate(p);
    const double ph = p.omega * t - p.phi0;
    return {2.0 * p.d0 * std::cos(ph), 2.0 * p.d0 * std::sin(ph), -p.delta_eps()};
}

inline EffectiveField polar_decomposition(const ModelParams& p) {
    validate(p);
    const double half_split = 0.5 * p.delta_eps();
    const double etilde2 = std::hypot(p.d0, half_split);
    const double cos_theta = -half_split / etilde2;
    const double sin_theta = p.d0 / etilde2;
    // Half-angle values straight from the field components:
    //   cos(theta/2) = sqrt((1 - (delta_eps/2)/etilde2)/2),
    //   sin(theta/2) = sqrt((1 + (delta_eps/2)/etilde2)/2).
    const double cos_half = std::sqrt(0.5 * (1.0 - half_split / etilde2));
    const double sin_half = std::sqrt(0.5 * (1.0 + half_split / etilde2));
    return {std::atan2(sin_theta, cos_theta), 2.0 * etilde2, cos_half, sin_half,
            cos_theta, sin_theta};
}

// Hamiltonian in the bare basis {|1>, |2>}: diagonal bare energies plus the
// rotating coupling D0*exp(-i(omega t - phi0)) in the upper corner.
inline Mat2 hamiltonian_at(const ModelParams& p, double t) {
    validate(p);
    const cplx off = p.d0 * std::polar(1.0, -(p.omega * t - p.phi0));
    return {cplx(p.eps1), off, std::conj(off), cplx(p.eps2)};
}

inline Spectrum spectrum(const ModelParams& p) {
    validate(p);
    const double etilde2 = std::hypot(p.d0, 0.5 * p.delta_eps());
    const double mid = 0.5 * (p.eps1 + p.eps2);
    return {mid - etilde2, mid + etilde2, etilde2, -etilde2};
}

// Instantaneous eigenvector of the Hamiltonian at time t:
//   which = 1 (energy e1): (-sin(theta/2),  cos(theta/2) e^{i(omega t - phi0)})
//   which = 2 (energy e2): ( cos(theta/2),  sin(theta/2) e^{i(omega t - phi0)})
inline Vec2 eigenstate_at(const ModelParams& p, double t, int which) {
    const EffectiveField f = polar_decomposition(p);
    if (which != 1 && which != 2)
        throw config_error("eigenstate index must be 1 or 2");
    const cplx ph = std::polar(1.0, p.omega * t - p.phi0);
    if (which == 1) return {cplx(-f.sin_half), f.cos_half * ph};
    return {cplx(f.cos_half), f.sin_half * ph};
}

inline RabiData rabi(const ModelParams& p) {
    validate(p);
    const double gamma = std::hypot(p.d0, 0.5 * (p.delta_eps() + p.omega));
    return {gamma, 2.0 * pi / p.omega, 2.0 * pi / gamma};
}

// Rabi frequency recomputed from the field geometry,
//   Gamma = (1/2) sqrt((B - omega cos(theta))^2 + omega^2 sin^2(theta)),
// used by the tests as an independent cross-check of rabi().
inline double rabi_from_field_form(const ModelParams& p) {
    const EffectiveField f = polar_decomposition(p);
    return 0.5 * std::hypot(f.b_norm - p.omega * f.cos_theta, p.omega * f.sin_theta);
}

} // namespace aaphase
