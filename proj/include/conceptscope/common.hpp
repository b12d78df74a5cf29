#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace conceptscope {

using ConceptId = std::uint32_t;
using Year = int;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad file contents, ragged rows, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// A precondition on arguments was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (unreadable or unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

/// A metric value that is undefined for its input (e.g. w_N of a year with no new concepts).
using MaybeReal = std::optional<double>;

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

}  // namespace conceptscope
