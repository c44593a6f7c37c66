#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rgmphd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A covariance handed to a density or merge routine is not positive definite.
class SingularCovariance : public Error {
public:
    explicit SingularCovariance(double eigenvalue)
        : Error("covariance is not positive definite (min eigenvalue " +
                std::to_string(eigenvalue) + ")"),
          eigenvalue_(eigenvalue) {}

    [[nodiscard]] double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

/// Innovation covariance S = HPH' + R could not be factorized.
class SingularInnovation : public Error {
public:
    explicit SingularInnovation(std::size_t component)
        : Error("singular innovation covariance for component " + std::to_string(component)),
          component_(component) {}

    [[nodiscard]] std::size_t component() const noexcept { return component_; }

private:
    std::size_t component_;
};

class InvalidDof : public Error {
public:
    explicit InvalidDof(double dof)
        : Error("Student-t degrees of freedom must exceed 2 (got " + std::to_string(dof) + ")") {}
};

/// Range-bearing measurement requested for a target at the sensor origin.
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

class RegularizationFailed : public Error {
public:
    using Error::Error;
};

/// Exhaustive partition enumeration was asked for too many measurements.
class TooLarge : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(double eigenvalue)
        : Error("matrix is not positive definite (min eigenvalue " + std::to_string(eigenvalue) + ")"),
          eigenvalue_(eigenvalue) {}

    [[nodiscard]] double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

/// Malformed experiment configuration document.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& key, const std::string& what)
        : Error("line " + std::to_string(line) + (key.empty() ? "" : ", key '" + key + "'") + ": " + what),
          line_(line), key_(key) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

/// A configuration value violates a documented constraint.
class ValidationError : public Error {
public:
    ValidationError(const std::string& key, const std::string& constraint)
        : Error("invalid value for '" + key + "': " + constraint), key_(key) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace rgmphd
