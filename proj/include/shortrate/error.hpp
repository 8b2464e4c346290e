#pragma once

#include <stdexcept>
#include <string>

namespace shortrate {

// Input outside a model's admissible domain (r < 0 for a square-root model,
// tau <= 0 for a yield, unsupported parameter combination, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to reach its tolerance or became unstable.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw DomainError(what);
}

}  // namespace detail
}  // namespace shortrate
