#pragma once

#include <stdexcept>
#include <string>

namespace rnnrat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands with mismatched variable counts or matrix shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Precondition on an argument violated (index out of range, empty list, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// An operation would produce a polynomial above the configured degree cap.
class BlowUpError : public Error {
public:
    using Error::Error;
};

/// Activation or system data that cannot be used for a construction.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Malformed spec file; carries the source line when known (0 otherwise).
class ParseError : public Error {
public:
    ParseError(const std::string &what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

/// Numeric integration produced a non-finite state.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string &what, double time) : Error(what), time_(time) {}

    double time() const { return time_; }

private:
    double time_;
};

/// A denominator came within the guard threshold of zero during simulation.
class SingularityError : public Error {
public:
    SingularityError(const std::string &what, double time) : Error(what), time_(time) {}

    double time() const { return time_; }

private:
    double time_;
};

} // namespace rnnrat
