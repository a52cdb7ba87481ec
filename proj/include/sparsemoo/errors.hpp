#pragma once

#include <stdexcept>
#include <string>

namespace sparsemoo {

/// Caller violated a documented precondition (bad sizes, bad flags).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Point or value outside the mathematical domain (infeasible x, NaN input).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed input data (CSV cells, labels, metric tables).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration would exceed the configured cap.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sparsemoo
