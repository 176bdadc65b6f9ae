// errors.hpp -- exception hierarchy shared by the whole library.
//
// Every failure mode the CLI maps to an exit code has its own type here, so
// callers can catch precisely and the front end never has to parse messages.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aaphase {

// Root of the hierarchy; everything thrown by this library derives from it.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration or invalid model parameters (CLI exit code 2).
class config_error : public error {
public:
    using error::error;
};

// A closed-form branch was invoked off its locus, e.g. case_integer_n with
// Gamma != n*omega.  Carries the offending ratio for diagnostics (exit 4).
class constraint_mismatch : public error {
public:
    constraint_mismatch(const std::string& what, double gamma_over_omega)
        : error(what), gamma_over_omega(gamma_over_omega) {}
    double gamma_over_omega;
};

// A coupling solver was asked for a regime the model cannot reach (exit 4).
class no_solution : public error {
public:
    using error::error;
};

// The ODE integrator hit its step cap before reaching the requested
// self-consistency; carries what it did achieve (exit 3).
class integration_failure : public error {
public:
    integration_failure(const std::string& what, double achieved_error,
                        std::size_t steps_used)
        : error(what), achieved_error(achieved_error), steps_used(steps_used) {}
    double achieved_error;
    std::size_t steps_used;
};

// Both singular values of the cyclicity matrix vanished: the null space is
// two-dimensional and the special initial state is not unique.
class degenerate_nullspace : public error {
public:
    using error::error;
};

// A phase was requested at (s0, tau) where the evolution does not close.
class not_cyclic : public error {
public:
    not_cyclic(const std::string& what, double fidelity_defect)
        : error(what), fidelity_defect(fidelity_defect) {}
    double fidelity_defect;
};

// An algebraic identity the implementation asserts internally (e.g. matrix
// determinant vs its closed form) failed -- always a bug, never user input.
class internal_error : public error {
public:
    using error::error;
};

} // namespace aaphase
