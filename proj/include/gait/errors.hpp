#pragma once

#include <stdexcept>
#include <string>

namespace gait {

// Base for all recoverable analysis errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inputs violate an operation's preconditions.
struct ArgumentError : Error {
    using Error::Error;
};

// Calibration data violates a rig invariant (non-orthonormal R, zero baseline, ...).
struct CalibrationError : Error {
    using Error::Error;
};

// Numerically degenerate triangulation (near-parallel rays).
struct IllConditionedError : Error {
    using Error::Error;
};

// Triangulated point is behind the reference camera.
struct CheiralityError : Error {
    using Error::Error;
};

// Event stream breaks per-foot alternation or ordering.
struct MalformedSequenceError : Error {
    using Error::Error;
};

// Stream alignment produced an inconsistent interleaving.
struct AlignmentError : Error {
    using Error::Error;
};

// File-level parse failure; carries a location string ("file:line" or field name).
struct ParseError : Error {
    ParseError(const std::string& where, const std::string& what)
        : Error(where + ": " + what), location(where) {}
    std::string location;
};

}  // namespace gait
