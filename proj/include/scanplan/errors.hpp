#pragma once

#include <stdexcept>
#include <string>

namespace scanplan {

/// Process exit codes used by the CLI. Library errors carry the code they
/// should map to when they surface through the pipeline.
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    coverage_failure = 3,
    infeasible_tolerance = 4,
    unreachable_pair = 5,
};

class Error : public std::runtime_error {
public:
    Error(std::string message, ExitCode code)
        : std::runtime_error(std::move(message)), code_(code) {}

    ExitCode exit_code() const noexcept { return code_; }

private:
    ExitCode code_;
};

/// Bad or missing configuration, unparsable input files, invalid arguments.
class ConfigError : public Error {
public:
    explicit ConfigError(std::string message)
        : Error(std::move(message), ExitCode::config_error) {}
};

/// Degenerate or inconsistent geometry (zero-area triangle, bad voxel edge,
/// degenerate line, MP off the surface, ...).
class GeometryError : public Error {
public:
    explicit GeometryError(std::string message)
        : Error(std::move(message), ExitCode::config_error) {}
};

/// Tolerance cannot be met by any incident angle (budget radicand <= 0, or
/// the sensor-uncertainty budget falls below the curve minimum).
class InfeasibleToleranceError : public Error {
public:
    explicit InfeasibleToleranceError(std::string message)
        : Error(std::move(message), ExitCode::infeasible_tolerance) {}
};

/// Incident angle beyond the validity limit of the configured curve.
class OutOfValidityError : public Error {
public:
    explicit OutOfValidityError(std::string message)
        : Error(std::move(message), ExitCode::config_error) {}
};

/// A voxel with no surviving candidate viewpoint, a candidate union that
/// misses MPs, or a planner that terminated without full coverage.
class CoverageFailureError : public Error {
public:
    explicit CoverageFailureError(std::string message)
        : Error(std::move(message), ExitCode::coverage_failure) {}
};

/// No collision-free local path between two viewpoints within the detour
/// planner's iteration budget.
class UnreachablePairError : public Error {
public:
    explicit UnreachablePairError(std::string message)
        : Error(std::move(message), ExitCode::unreachable_pair) {}
};

/// A plan graph that violates its structural invariants (e.g. a node with
/// an empty newly-covered set outside the root).
class InvalidGraphError : public Error {
public:
    explicit InvalidGraphError(std::string message)
        : Error(std::move(message), ExitCode::config_error) {}
};

/// Parent cost evaluated on a pairing with zero combined first-time coverage.
class DegenerateCostError : public Error {
public:
    explicit DegenerateCostError(std::string message)
        : Error(std::move(message), ExitCode::config_error) {}
};

}  // namespace scanplan
