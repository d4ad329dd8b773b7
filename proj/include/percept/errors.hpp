#pragma once

#include <stdexcept>
#include <string>

namespace percept {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Incompatible or non-square matrix/vector dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Operation only implemented for small sizes (n <= 4).
class UnsupportedSizeError : public Error {
public:
    using Error::Error;
};

/// Invalid argument value (non-positive step, odd panel count, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Elimination hit a pivot below the singularity threshold.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double pivot_magnitude)
        : Error(what), pivot(pivot_magnitude) {}
    double pivot;
};

/// Input matrix does not have the full rank the operation requires.
class RankError : public Error {
public:
    using Error::Error;
};

/// ODE state became non-finite; carries the last time the state was valid.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double t)
        : Error(what), last_valid_time(t) {}
    double last_valid_time;
};

/// Image velocity too small to define a time-to-transit.
class UndefinedTauError : public Error {
public:
    using Error::Error;
};

/// Photoreceptor gaze does not intersect the intended wall.
class NoIntersectionError : public Error {
public:
    using Error::Error;
};

/// Heading at (or numerically indistinguishable from) a critical angle.
class CriticalHeadingError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain an analysis result is stated for.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Patterned Gramian is singular: the channel subset cannot steer the system.
class NotControllableError : public Error {
public:
    NotControllableError(const std::string& what, std::string pattern)
        : Error(what), pattern_name(std::move(pattern)) {}
    std::string pattern_name;
};

/// Two independent computations of the same quantity disagree.
class InternalConsistencyError : public Error {
public:
    using Error::Error;
};

/// Iterative solver stopped without meeting its tolerance.
class NoSolutionError : public Error {
public:
    NoSolutionError(const std::string& what, double final_residual)
        : Error(what), residual(final_residual) {}
    double residual;
};

} // namespace percept
