#pragma once

#include <stdexcept>
#include <string>

namespace pmwls {

/// Bad input: malformed data, inconsistent dimensions, out-of-range parameters.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The numerics broke down: non-finite values, degenerate factorizations.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail_validation(const std::string& what) { throw ValidationError(what); }
[[noreturn]] inline void fail_numerical(const std::string& what) { throw NumericalError(what); }

inline void require(bool ok, const std::string& what) {
    if (!ok) fail_validation(what);
}

}  // namespace detail
}  // namespace pmwls
