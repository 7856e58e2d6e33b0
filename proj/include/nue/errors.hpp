#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nue {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input outside the documented domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// An orbit landed exactly on the singular set; carries the hit index.
struct SingularityError : Error {
    std::size_t index;
    SingularityError(std::size_t idx, const std::string& what_arg)
        : Error(what_arg), index(idx) {}
};

// Missing delta level, inconsistent parameter block, malformed config file.
struct ConfigError : Error {
    using Error::Error;
};

// A documented precondition was violated by the caller.
struct ContractError : Error {
    using Error::Error;
};

// Not enough data to fit the requested model.
struct UnderdeterminedError : Error {
    using Error::Error;
};

}  // namespace nue
