#pragma once

#include <stdexcept>
#include <string>

namespace waterfall {

/// Base class for all toolkit failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An SNR value outside its domain (negative, zero where positive is required, or NaN).
struct InvalidSnr : Error {
    using Error::Error;
};

/// Adaptive quadrature exhausted its subdivision budget before reaching tolerance.
struct NonConvergence : Error {
    using Error::Error;
};

/// Input is structurally valid but yields no meaningful result (e.g. a
/// threshold bracket that is non-positive within tolerance).
struct DegenerateInput : Error {
    using Error::Error;
};

/// Sequence length inconsistent with the codeword structure of the scheme.
struct LengthMismatch : Error {
    using Error::Error;
};

/// No grid point with all frames in error: the grid does not reach low enough SNR.
struct NoWaterfallRegion : Error {
    using Error::Error;
};

/// Every grid point has all frames in error: the grid does not reach high enough SNR.
struct NoConvergedRegion : Error {
    using Error::Error;
};

/// The requested FER level is not bracketed by the curve samples.
struct LevelNotBracketed : Error {
    using Error::Error;
};

struct EmptyCurve : Error {
    using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace waterfall
