#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ma_radial {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A nonlinearity produced a negative or non-finite value.
class InvalidNonlinearity : public Error {
public:
    using Error::Error;
};

/// Malformed expression text; `offset` is the 0-based character position.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Asymptotic limits could not be classified.
class UndeterminedLimit : public Error {
public:
    using Error::Error;
};

/// Problem file failed to parse or validate.
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace ma_radial
