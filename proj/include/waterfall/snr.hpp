#pragma once

#include <cmath>
#include <compare>

#include "waterfall/errors.hpp"

namespace waterfall {

/// Signal-to-noise ratio stored in linear scale (a nonnegative ratio of
/// energies). All internal computation works on the linear value; dB exists
/// only at the conversion boundary.
class Snr {
public:
    static Snr from_linear(double value) {
        if (!(value >= 0.0)) // also rejects NaN
            throw InvalidSnr("SNR must be a nonnegative finite ratio");
        if (std::isinf(value))
            throw InvalidSnr("SNR must be finite");
        return Snr(value);
    }

    static Snr from_db(double db) {
        return from_linear(std::pow(10.0, db / 10.0));
    }

    double linear() const { return value_; }

    /// 10*log10(value); -inf for a zero ratio.
    double db() const { return 10.0 * std::log10(value_); }

    friend auto operator<=>(Snr a, Snr b) { return a.value_ <=> b.value_; }
    friend bool operator==(Snr a, Snr b) { return a.value_ == b.value_; }

private:
    explicit Snr(double v) : value_(v) {}
    double value_;
};

} // namespace waterfall
