#pragma once

#include <stdexcept>
#include <string>

namespace bridge {

/// Bad or inconsistent input: dimensions, domains, malformed files.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed: quadrature did not converge, a factorization
/// broke down, a rejection loop hit its iteration cap.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

}  // namespace detail
}  // namespace bridge
