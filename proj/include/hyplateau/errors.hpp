#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hyplateau {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside an operation's precondition (index range, shape, parameter window).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Curvature vector outside the open Garding cone required by a curvature function.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// Non-positive height passed where a hyperbolic quantity is requested.
class DegenerateHeight : public Error {
public:
    using Error::Error;
};

class Unsupported : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class SingularJacobian : public Error {
public:
    using Error::Error;
};

/// Raised by the discrete residual when one or more interior nodes leave the cone.
class AdmissibilityLost : public Error {
public:
    AdmissibilityLost(std::string what, std::vector<std::size_t> nodes)
        : Error(std::move(what)), nodes_(std::move(nodes)) {}

    const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

private:
    std::vector<std::size_t> nodes_;
};

/// Invalid run configuration; the message lists every violation found.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

}  // namespace hyplateau
