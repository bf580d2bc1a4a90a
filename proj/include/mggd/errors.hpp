#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mggd {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class EmptyTrace : public Error {
public:
    using Error::Error;
};

class ZeroDerivative : public Error {
public:
    using Error::Error;
};

// Raised when a sample makes the estimating equations undefined (zero or
// underflowing quadratic form, rank deficiency, too few rows).
class DegenerateData : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit DegenerateData(const std::string& what, std::size_t row = npos)
        : Error(what), row_(row) {}

    // Offending observation index, or npos when the problem is global.
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

}  // namespace mggd
