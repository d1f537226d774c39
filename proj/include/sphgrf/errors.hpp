#pragma once

#include <stdexcept>
#include <string>

namespace sphgrf {

/// Argument outside the mathematical domain of a function (e.g. |mu| > 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid spherical-harmonic order for the requested degree.
class OrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A series required to be finite diverges for the given spectrum.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature or grid too coarse for an exactness-dependent computation.
class InsufficientQuadratureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration or inconsistent inputs (grid mismatch, bad flags, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical overflow or nonrepresentable values (e.g. exp of huge field values).
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// File I/O failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sphgrf
