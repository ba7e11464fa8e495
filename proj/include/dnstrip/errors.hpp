#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dnstrip {

/// Bad user input: malformed parameters, inadmissible geometry, violated preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not deliver a certified result.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zero or tiny pivot during an unpivoted LDL^T factorization.
class SingularShift : public NumericalFailure {
public:
    SingularShift(const std::string& what, std::size_t pivot)
        : NumericalFailure(what), pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

} // namespace dnstrip
