#pragma once

#include <stdexcept>
#include <string>

namespace kernelsum {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// A caller broke a documented precondition (unsorted input, size mismatch, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

class ConfigurationError : public Error {
public:
    using Error::Error;
};

class UnsupportedKernelError : public Error {
public:
    using Error::Error;
};

/// Raised by series and quadrature routines; `partial()` is the best value
/// reached before giving up.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double partial)
        : Error(what), partial_(partial) {}

    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

class BudgetError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const char* msg) {
    if (!ok) throw ContractError(msg);
}

}  // namespace detail
}  // namespace kernelsum
