#pragma once

#include <stdexcept>
#include <string>

namespace phicont {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unknown catalog key, malformed config, or an out-of-range parameter.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A structural hypothesis of the problem is broken (e.g. forcing with nonzero mean).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The homogeneous periodic problem has a nontrivial solution, so the
/// matching system cannot be solved reliably.
class ResonanceError : public Error {
public:
    ResonanceError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition_number() const noexcept { return condition_; }

private:
    double condition_;
};

/// Step size underflow inside the IVP integrator.
class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, double time)
        : Error(what), time_(time) {}
    double blowup_time() const noexcept { return time_; }

private:
    double time_;
};

/// The right-hand side returned a non-finite value; for the phi-Laplacian this
/// means u' reached the edge of the domain of phi.
class DomainEscape : public IntegrationFailure {
public:
    using IntegrationFailure::IntegrationFailure;
};

/// Newton iteration or continuation could not reach the requested point.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace phicont
