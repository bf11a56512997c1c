#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "waterfall/conv_code.hpp"
#include "waterfall/errors.hpp"
#include "waterfall/rng.hpp"

namespace waterfall {

/// Uniformly random permutation of {0,...,length-1} via seeded Fisher-Yates;
/// the same (length, seed) always yields the same permutation.
inline std::vector<std::uint32_t> make_interleaver(std::size_t length, std::uint64_t seed) {
    if (length == 0)
        throw std::invalid_argument("make_interleaver: length must be >= 1");
    std::vector<std::uint32_t> pi(length);
    std::iota(pi.begin(), pi.end(), 0u);
    Rng rng = Rng::derive(seed, 0x696e746cu); // dedicated stream, apart from trial RNGs
    for (std::size_t i = length - 1; i > 0; --i)
        std::swap(pi[i], pi[rng.uniform_below(i + 1)]);
    return pi;
}

/// Parallel concatenation of two identical RSC constituents. Encoder 1 is
/// terminated, encoder 2 is left open; the interleaver length fixes the
/// frame length.
struct TurboCodeSpec {
    ConvCodeSpec constituent = ConvCodeSpec::rsc_5_7();
    std::vector<std::uint32_t> interleaver;
    int iterations = 8;

    /// Rate-1/3 code over (1,5/7) constituents with a seeded random interleaver.
    static TurboCodeSpec turbo_5_7(std::size_t frame_length, std::uint64_t interleaver_seed,
                                   int iterations = 8) {
        TurboCodeSpec spec;
        spec.interleaver = make_interleaver(frame_length, interleaver_seed);
        spec.iterations = iterations;
        return spec;
    }

    std::size_t frame_length() const { return interleaver.size(); }

    void validate() const {
        constituent.validate();
        if (iterations < 1)
            throw std::invalid_argument("TurboCodeSpec: iterations must be >= 1");
        if (interleaver.empty())
            throw std::invalid_argument("TurboCodeSpec: empty interleaver");
        std::vector<std::uint8_t> seen(interleaver.size(), 0);
        for (std::uint32_t p : interleaver) {
            if (p >= interleaver.size() || seen[p])
                throw std::invalid_argument("TurboCodeSpec: interleaver is not a permutation");
            seen[p] = 1;
        }
    }
};

/// systematic: L info bits plus encoder-1 tail (L+m); parity1: L+m; parity2: L.
struct TurboCodeword {
    std::vector<std::uint8_t> systematic;
    std::vector<std::uint8_t> parity1;
    std::vector<std::uint8_t> parity2;
};

inline TurboCodeword turbo_encode(std::span<const std::uint8_t> bits, const TurboCodeSpec& spec) {
    const std::size_t L = spec.frame_length();
    if (bits.size() != L)
        throw LengthMismatch("turbo_encode: input length differs from interleaver length");

    ConvCodeSpec enc1 = spec.constituent;
    enc1.terminated = true;
    ConvCodeSpec enc2 = spec.constituent;
    enc2.terminated = false;

    RscCodeword first = rsc_encode(bits, enc1);

    std::vector<std::uint8_t> permuted(L);
    for (std::size_t k = 0; k < L; ++k)
        permuted[k] = bits[spec.interleaver[k]];
    RscCodeword second = rsc_encode(permuted, enc2);

    return {std::move(first.systematic), std::move(first.parity), std::move(second.parity)};
}

/// Channel LLR layout of a turbo codeword: L interleaved triples
/// (systematic, parity1, parity2) followed by m tail pairs (systematic, parity1).
inline std::size_t turbo_llr_count(const TurboCodeSpec& spec) {
    return 3 * spec.frame_length() + 2 * static_cast<std::size_t>(spec.constituent.memory);
}

inline LlrFrame turbo_multiplex_llrs(std::span<const double> systematic,
                                     std::span<const double> parity1,
                                     std::span<const double> parity2,
                                     const TurboCodeSpec& spec) {
    const std::size_t L = spec.frame_length();
    const std::size_t m = static_cast<std::size_t>(spec.constituent.memory);
    if (systematic.size() != L + m || parity1.size() != L + m || parity2.size() != L)
        throw LengthMismatch("turbo_multiplex_llrs: stream lengths inconsistent with spec");
    LlrFrame frame;
    frame.values.reserve(3 * L + 2 * m);
    for (std::size_t k = 0; k < L; ++k) {
        frame.values.push_back(systematic[k]);
        frame.values.push_back(parity1[k]);
        frame.values.push_back(parity2[k]);
    }
    for (std::size_t k = L; k < L + m; ++k) {
        frame.values.push_back(systematic[k]);
        frame.values.push_back(parity1[k]);
    }
    return frame;
}

/// Iterative exchange of extrinsic information between the two constituent
/// log-MAP decoders; hard decision on the final a-posteriori LLRs.
inline std::vector<std::uint8_t> turbo_decode(const LlrFrame& llrs, const TurboCodeSpec& spec) {
    spec.validate();
    const std::size_t L = spec.frame_length();
    const std::size_t m = static_cast<std::size_t>(spec.constituent.memory);
    if (llrs.values.size() != 3 * L + 2 * m)
        throw LengthMismatch("turbo_decode: LLR count does not match the codeword structure");

    // Demultiplex into the two constituent views.
    LlrFrame dec1; // (sys, par1) over L+m steps
    dec1.values.resize(2 * (L + m));
    std::vector<double> sys(L);
    std::vector<double> par2(L);
    for (std::size_t k = 0; k < L; ++k) {
        sys[k] = llrs.values[3 * k];
        dec1.values[2 * k] = llrs.values[3 * k];
        dec1.values[2 * k + 1] = llrs.values[3 * k + 1];
        par2[k] = llrs.values[3 * k + 2];
    }
    for (std::size_t k = 0; k < m; ++k) {
        dec1.values[2 * (L + k)] = llrs.values[3 * L + 2 * k];
        dec1.values[2 * (L + k) + 1] = llrs.values[3 * L + 2 * k + 1];
    }
    LlrFrame dec2; // (interleaved sys, par2) over L steps
    dec2.values.resize(2 * L);
    for (std::size_t k = 0; k < L; ++k) {
        dec2.values[2 * k] = sys[spec.interleaver[k]];
        dec2.values[2 * k + 1] = par2[k];
    }

    ConvCodeSpec c1 = spec.constituent;
    c1.terminated = true;
    ConvCodeSpec c2 = spec.constituent;
    c2.terminated = false;

    std::vector<double> apriori1(L, 0.0);
    std::vector<double> apriori2(L);
    std::vector<double> final_llrs(L);

    for (int it = 0; it < spec.iterations; ++it) {
        BcjrResult r1 = bcjr_decode(dec1, apriori1, c1);
        for (std::size_t k = 0; k < L; ++k)
            apriori2[k] = r1.extrinsic[spec.interleaver[k]];

        BcjrResult r2 = bcjr_decode(dec2, apriori2, c2);
        for (std::size_t k = 0; k < L; ++k)
            apriori1[spec.interleaver[k]] = r2.extrinsic[k];

        if (it == spec.iterations - 1)
            for (std::size_t k = 0; k < L; ++k)
                final_llrs[spec.interleaver[k]] = r2.aposteriori[k];
    }

    std::vector<std::uint8_t> bits(L);
    for (std::size_t k = 0; k < L; ++k)
        bits[k] = final_llrs[k] < 0.0 ? 1 : 0;
    return bits;
}

} // namespace waterfall
