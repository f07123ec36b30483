#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netdos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad edge lists, out-of-range ids, inconsistent sizes.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A numerical routine produced NaN/Inf or left its valid domain.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::size_t iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

} // namespace netdos
