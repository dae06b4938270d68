#pragma once

#include <stdexcept>
#include <string>

namespace harvest {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A capacitance profile violates its invariants (bad pitch, negative
/// capacitance, too few table samples, ...).
class InvalidProfileError : public Error {
public:
    using Error::Error;
};

/// A comb geometry cannot produce a valid profile (e.g. zero cells).
class InvalidGeometryError : public Error {
public:
    using Error::Error;
};

/// A design failed validation for a reason other than pull-in.
class InvalidDesignError : public Error {
public:
    using Error::Error;
};

/// Polarization voltage at or above the configured pull-in threshold;
/// simulation is refused rather than producing meaningless output.
class PullInError : public Error {
public:
    using Error::Error;
};

/// The integrator produced a non-finite state.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double t_fail)
        : Error(what), t_fail_s(t_fail) {}
    double t_fail_s = 0.0;
};

/// An argument is outside the operation's domain (unknown scenario name,
/// frequency grid not bracketing resonance, measurement span too short, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Grid search found no candidate satisfying the constraints.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Configuration file problem; the message names the offending key or line.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace harvest
