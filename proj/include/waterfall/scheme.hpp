#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "waterfall/channel.hpp"
#include "waterfall/conv_code.hpp"
#include "waterfall/numerics.hpp"
#include "waterfall/turbo_code.hpp"

namespace waterfall {

enum class SchemeKind { uncoded, convolutional, turbo };

inline const char* to_string(SchemeKind kind) {
    switch (kind) {
    case SchemeKind::uncoded: return "uncoded";
    case SchemeKind::convolutional: return "convolutional";
    case SchemeKind::turbo: return "turbo";
    }
    return "?";
}

/// Full description of one BPSK transmission chain.
struct SchemeSpec {
    SchemeKind kind = SchemeKind::uncoded;
    std::size_t frame_length = 256; ///< information bits per frame
    ConvCodeSpec conv = ConvCodeSpec::rsc_17_15();
    TurboCodeSpec turbo; ///< interleaver empty unless kind == turbo

    static SchemeSpec uncoded(std::size_t L) {
        return {SchemeKind::uncoded, L, {}, {}};
    }
    static SchemeSpec convolutional(std::size_t L, ConvCodeSpec code = ConvCodeSpec::rsc_17_15()) {
        return {SchemeKind::convolutional, L, code, {}};
    }
    static SchemeSpec turbo_scheme(std::size_t L, std::uint64_t interleaver_seed = 1,
                                   int iterations = 8) {
        SchemeSpec spec;
        spec.kind = SchemeKind::turbo;
        spec.frame_length = L;
        spec.turbo = TurboCodeSpec::turbo_5_7(L, interleaver_seed, iterations);
        return spec;
    }

    void validate() const {
        if (frame_length < 1)
            throw std::invalid_argument("SchemeSpec: frame_length must be >= 1");
        if (kind == SchemeKind::convolutional)
            conv.validate();
        if (kind == SchemeKind::turbo) {
            turbo.validate();
            if (turbo.frame_length() != frame_length)
                throw std::invalid_argument("SchemeSpec: interleaver length != frame_length");
        }
    }

    std::string describe() const {
        std::string s = to_string(kind);
        s += " L=" + std::to_string(frame_length);
        return s;
    }
};

/// Probability that an uncoded BPSK frame of L bits is detected without error
/// in AWGN at instantaneous SNR gamma: (1 - Q(sqrt(2*gamma)))^L.
inline double uncoded_detection_probability(Snr gamma, std::size_t frame_length) {
    if (frame_length < 1)
        throw std::invalid_argument("uncoded_detection_probability: L must be >= 1");
    const double q = q_function(std::sqrt(2.0 * gamma.linear()));
    return std::exp(static_cast<double>(frame_length) * std::log1p(-q));
}

/// One end-to-end AWGN trial at instantaneous SNR gamma: draw random info
/// bits, encode, modulate, add noise, decode, compare. Channel LLRs are
/// 4*gamma*y for unit-energy symbols, exact for BPSK at known SNR.
inline bool transmit_and_detect(const SchemeSpec& scheme, Snr gamma, Rng& rng) {
    if (gamma.linear() <= 0.0)
        throw InvalidSnr("transmit_and_detect: SNR must be strictly positive");
    const std::size_t L = scheme.frame_length;
    std::vector<std::uint8_t> bits(L);
    for (auto& b : bits)
        b = rng.bit() ? 1 : 0;

    const double llr_scale = 4.0 * gamma.linear();
    auto to_llrs = [&](std::span<const std::uint8_t> code_bits, std::vector<double>& out) {
        const ModulatedFrame tx = bpsk_modulate(code_bits, 1.0);
        const ReceivedFrame rx = add_awgn(tx, gamma, rng);
        out.resize(rx.samples.size());
        for (std::size_t i = 0; i < rx.samples.size(); ++i)
            out[i] = llr_scale * rx.samples[i];
    };

    switch (scheme.kind) {
    case SchemeKind::uncoded: {
        std::vector<double> llrs;
        to_llrs(bits, llrs);
        for (std::size_t i = 0; i < L; ++i)
            if ((llrs[i] < 0.0 ? 1 : 0) != bits[i])
                return false;
        return true;
    }
    case SchemeKind::convolutional: {
        const RscCodeword cw = rsc_encode(bits, scheme.conv);
        std::vector<std::uint8_t> mux;
        mux.reserve(2 * cw.systematic.size());
        for (std::size_t k = 0; k < cw.systematic.size(); ++k) {
            mux.push_back(cw.systematic[k]);
            mux.push_back(cw.parity[k]);
        }
        LlrFrame llrs;
        to_llrs(mux, llrs.values);
        const std::vector<std::uint8_t> decoded = viterbi_decode(llrs, scheme.conv);
        for (std::size_t i = 0; i < L; ++i)
            if (decoded[i] != bits[i])
                return false;
        return true;
    }
    case SchemeKind::turbo: {
        const TurboCodeword cw = turbo_encode(bits, scheme.turbo);
        const std::size_t m = static_cast<std::size_t>(scheme.turbo.constituent.memory);
        std::vector<std::uint8_t> mux;
        mux.reserve(3 * L + 2 * m);
        for (std::size_t k = 0; k < L; ++k) {
            mux.push_back(cw.systematic[k]);
            mux.push_back(cw.parity1[k]);
            mux.push_back(cw.parity2[k]);
        }
        for (std::size_t k = L; k < L + m; ++k) {
            mux.push_back(cw.systematic[k]);
            mux.push_back(cw.parity1[k]);
        }
        LlrFrame llrs;
        to_llrs(mux, llrs.values);
        const std::vector<std::uint8_t> decoded = turbo_decode(llrs, scheme.turbo);
        for (std::size_t i = 0; i < L; ++i)
            if (decoded[i] != bits[i])
                return false;
        return true;
    }
    }
    return false;
}

} // namespace waterfall
