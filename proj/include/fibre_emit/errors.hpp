#pragma once

#include <stdexcept>
#include <string>

namespace fibre_emit {

// Argument outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Missing or malformed input data (level table, reduced elements, dispersion).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature, root finding or series truncation failed to reach tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    explicit NumericalError(const std::string& what)
        : NumericalError(what, -1.0) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Malformed run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fibre_emit
