#pragma once

#include <stdexcept>
#include <string>

namespace rkl {

// Error taxonomy mirrored by the C API status codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller passed something out of contract (bad sizes, bad ranges, bad names).
struct InvalidArgument : Error {
    using Error::Error;
};

// Filesystem trouble: missing file, unreadable, short write.
struct IoError : Error {
    using Error::Error;
};

// File exists but its contents fail validation (bad magic, digest, version).
struct CorruptData : Error {
    using Error::Error;
};

// Numeric breakdown: ill-conditioned solve, scale factor underflow, overflow.
struct NumericError : Error {
    using Error::Error;
};

// Operation requires a state the object is not in (e.g. exporting an
// unquantized bundle).
struct StateError : Error {
    using Error::Error;
};

// Rate pair or format variant the library deliberately does not handle.
struct Unsupported : Error {
    using Error::Error;
};

}  // namespace rkl
