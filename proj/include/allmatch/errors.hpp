#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace allmatch {

/// Base for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation needs a different matrix shape (e.g. square input).
class shape_error : public error {
public:
    using error::error;
};

/// Input exceeds a documented size limit of an exact or exhaustive routine.
class capacity_error : public error {
public:
    using error::error;
};

/// Argument outside the domain of a formula.
class domain_error : public error {
public:
    using error::error;
};

/// Malformed ensemble description.
class spec_error : public error {
public:
    using error::error;
};

/// Ratio with zero denominator, e.g. RM critical ratio when per(A) = 0.
class undefined_ratio_error : public error {
public:
    using error::error;
};

/// Two computations that must agree did not. Always a bug.
class consistency_error : public error {
public:
    using error::error;
};

/// Exhaustive outcome distributions of two estimators differ.
class equivalence_error : public error {
public:
    using error::error;
};

class parse_error : public error {
public:
    parse_error(std::size_t line, const std::string& what)
        : error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace allmatch
