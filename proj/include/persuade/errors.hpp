#pragma once

#include <stdexcept>
#include <string>

namespace persuade {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ZeroMassError : public Error {
public:
    ZeroMassError() : Error("operation requires a measure with positive mass") {}
};

class NotSubmeasureError : public Error {
public:
    explicit NotSubmeasureError(const std::string& point)
        : Error("not a sub-measure: weight exceeded at point " + point), point(point) {}
    std::string point;
};

class MassMismatchError : public Error {
public:
    explicit MassMismatchError(const std::string& what = "total masses do not satisfy the precondition")
        : Error(what) {}
};

class MeanMismatchError : public Error {
public:
    MeanMismatchError() : Error("barycenters differ; Blackwell comparison requires equal means") {}
};

class MissingTransitionError : public Error {
public:
    explicit MissingTransitionError(const std::string& point)
        : Error("kernel has no transition for point " + point), point(point) {}
    std::string point;
};

class DegenerateGridError : public Error {
public:
    explicit DegenerateGridError(const std::string& what = "grid is degenerate") : Error(what) {}
};

class InvalidPrecisionError : public Error {
public:
    InvalidPrecisionError() : Error("signal precision must lie in [1/2, 1]") {}
};

class OffGridSupportError : public Error {
public:
    explicit OffGridSupportError(const std::string& point)
        : Error("measure support point " + point + " is not a grid point"), point(point) {}
    std::string point;
};

class MassTooLargeError : public Error {
public:
    explicit MassTooLargeError(const std::string& what = "requested mass exceeds the greedy mass")
        : Error(what) {}
};

class HorizonTooLargeError : public Error {
public:
    explicit HorizonTooLargeError(const std::string& what) : Error(what) {}
};

/// Signals an internal solver inconsistency; well-formed specs always admit a feasible plan.
class InfeasibleSpecError : public Error {
public:
    explicit InfeasibleSpecError(const std::string& what) : Error(what) {}
};

class ToleranceUnachievableError : public Error {
public:
    explicit ToleranceUnachievableError(const std::string& what) : Error(what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

} // namespace persuade
