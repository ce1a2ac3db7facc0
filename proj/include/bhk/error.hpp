#pragma once

#include <stdexcept>
#include <string>

namespace bhk {

/// Input outside the mathematical domain of an operation (t <= 0, a point
/// outside the ball, a point outside a half-space, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Geometry that has no well-defined direction: a zero vector where a
/// tangent plane is needed, or antipodal directions for a chord plane.
class DegenerateGeometryError : public DomainError {
public:
    explicit DegenerateGeometryError(const std::string& what) : DomainError(what) {}
};

/// A numerical method could not reach the requested accuracy.
class AccuracyError : public std::runtime_error {
public:
    explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed request at the API or command-line level.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace bhk
