#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "waterfall/errors.hpp"
#include "waterfall/rng.hpp"
#include "waterfall/snr.hpp"

namespace waterfall {

/// Real-baseband BPSK frame; every symbol is +/- sqrt(Es).
struct ModulatedFrame {
    std::vector<double> symbols;
    double symbol_energy = 1.0;
};

/// Frame after coherent combining at the receiver, together with the
/// instantaneous SNR the samples were produced at.
struct ReceivedFrame {
    std::vector<double> samples;
    Snr instantaneous_snr;
};

/// Bit 0 -> +sqrt(Es), bit 1 -> -sqrt(Es).
inline ModulatedFrame bpsk_modulate(std::span<const std::uint8_t> bits, double symbol_energy) {
    if (!(symbol_energy > 0.0))
        throw std::invalid_argument("bpsk_modulate: symbol energy must be positive");
    const double amp = std::sqrt(symbol_energy);
    ModulatedFrame frame;
    frame.symbol_energy = symbol_energy;
    frame.symbols.reserve(bits.size());
    for (std::uint8_t b : bits)
        frame.symbols.push_back(b ? -amp : amp);
    return frame;
}

/// AWGN at per-symbol SNR Es/N0 = snr: noise variance Es/(2*snr) per real
/// dimension. Deterministic for a given rng state.
inline ReceivedFrame add_awgn(const ModulatedFrame& frame, Snr snr, Rng& rng) {
    if (snr.linear() <= 0.0)
        throw InvalidSnr("add_awgn: SNR must be strictly positive");
    const double sigma = std::sqrt(frame.symbol_energy / (2.0 * snr.linear()));
    ReceivedFrame received{{}, snr};
    received.samples.reserve(frame.symbols.size());
    for (double s : frame.symbols)
        received.samples.push_back(s + sigma * rng.gaussian());
    return received;
}

/// Draw the instantaneous SNR of one quasi-static frame: exponential with
/// mean avg_snr (chi-square with two degrees of freedom in the fading
/// magnitude), via inverse-CDF sampling.
inline Snr sample_instantaneous_snr(Snr avg_snr, Rng& rng) {
    if (avg_snr.linear() <= 0.0)
        throw InvalidSnr("sample_instantaneous_snr: average SNR must be positive");
    return Snr::from_linear(-avg_snr.linear() * std::log(rng.uniform01()));
}

/// Density of the instantaneous SNR under Rayleigh fading:
/// p(gamma) = (1/avg) * exp(-gamma/avg) for gamma >= 0.
inline double fading_snr_pdf(Snr gamma, Snr avg_snr) {
    if (avg_snr.linear() <= 0.0)
        throw InvalidSnr("fading_snr_pdf: average SNR must be positive");
    const double mean = avg_snr.linear();
    return std::exp(-gamma.linear() / mean) / mean;
}

} // namespace waterfall
