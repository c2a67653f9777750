#pragma once

#include <stdexcept>
#include <string>

namespace tabadv {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch between operands; the message names both shapes.
struct ShapeError : Error {
    using Error::Error;
};

/// Non-finite value where a finite one is required.
struct NumericError : Error {
    using Error::Error;
};

/// Argument outside its documented domain.
struct DomainError : Error {
    using Error::Error;
};

/// Malformed input file (CSV cell, bad label, empty file).
struct ParseError : Error {
    using Error::Error;
};

/// Invalid or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Both classes are required but only one is present.
struct StratificationError : Error {
    using Error::Error;
};

/// Training failed (divergence, degenerate data); carries the epoch when known.
struct TrainingError : Error {
    explicit TrainingError(const std::string& msg, long epoch = -1)
        : Error(msg), epoch(epoch) {}
    long epoch;
};

/// Operation called in the wrong order (e.g. backward without forward).
struct StateError : Error {
    using Error::Error;
};

/// Filesystem failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace tabadv
