#pragma once

#include <stdexcept>
#include <string>

namespace sbgeo {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point (or a finite-difference stencil around it) left the model's domain.
struct DomainError : Error {
    using Error::Error;
};

// h failed the positive-definiteness / Hermitian checks.
struct SingularMetric : Error {
    using Error::Error;
};

struct ZeroVector : Error {
    using Error::Error;
};

// A trajectory left the chart domain; carries the parameter time of exit.
struct DomainExit : Error {
    double exit_time;
    DomainExit(const std::string& msg, double t) : Error(msg), exit_time(t) {}
};

struct StepTooLarge : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

struct BeyondInjectivityBound : Error {
    using Error::Error;
};

struct NotProper : Error {
    using Error::Error;
};

struct GridMismatch : Error {
    using Error::Error;
};

struct BadSeedFrame : Error {
    using Error::Error;
};

// Quotient sn'_K/sn_K evaluated at a zero of sn_K.
struct PoleError : Error {
    using Error::Error;
};

// det of the normal Jacobi matrix hit zero (conjugate point) before the
// requested radius.
struct ConjugatePoint : Error {
    using Error::Error;
};

struct UnknownModel : Error {
    using Error::Error;
};

struct BadParams : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Curvature sampling could not certify a positive bound constant.
struct InconclusiveK : Error {
    using Error::Error;
};

} // namespace sbgeo
