#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "waterfall/errors.hpp"

namespace waterfall {

/// Log-likelihood ratios with the convention LLR > 0 favors bit 0.
struct LlrFrame {
    std::vector<double> values;
};

/// Recursive systematic convolutional code (1, f/g). Generators are given as
/// octal numerals, most significant digit carrying the current-input tap:
/// e.g. 017 = 1+D+D^2+D^3, 015 = 1+D+D^3.
struct ConvCodeSpec {
    unsigned feedforward = 017;
    unsigned feedback = 015;
    int memory = 3;
    bool terminated = true;

    /// Rate-1/2 code with generators (1,17/15).
    static ConvCodeSpec rsc_17_15() { return {017, 015, 3, true}; }
    /// Constituent of the rate-1/3 turbo code, generators (1,5/7).
    static ConvCodeSpec rsc_5_7() { return {05, 07, 2, true}; }

    int states() const { return 1 << memory; }

    /// Coefficient of D^i, i in [0, memory].
    unsigned ff_coeff(int i) const { return (feedforward >> (memory - i)) & 1u; }
    unsigned fb_coeff(int i) const { return (feedback >> (memory - i)) & 1u; }

    void validate() const {
        if (memory < 1 || memory > 16)
            throw std::invalid_argument("ConvCodeSpec: memory out of range");
        const unsigned limit = 1u << (memory + 1);
        if (feedforward == 0 || feedforward >= limit || feedback >= limit)
            throw std::invalid_argument("ConvCodeSpec: generator does not fit in memory+1 bits");
        if (fb_coeff(0) != 1)
            throw std::invalid_argument("ConvCodeSpec: feedback polynomial must have a leading 1");
    }
};

/// Systematic and parity streams of one encoded frame. When the code is
/// terminated both streams carry `memory` extra tail positions.
struct RscCodeword {
    std::vector<std::uint8_t> systematic;
    std::vector<std::uint8_t> parity;
};

namespace detail {

// Precomputed state-transition table. State bits hold the most recent
// feedback values, newest in the LSB.
class Trellis {
public:
    explicit Trellis(const ConvCodeSpec& spec) : memory_(spec.memory), n_states_(spec.states()) {
        spec.validate();
        unsigned fb_state_mask = 0;
        unsigned ff_state_mask = 0;
        for (int i = 1; i <= memory_; ++i) {
            fb_state_mask |= spec.fb_coeff(i) << (i - 1);
            ff_state_mask |= spec.ff_coeff(i) << (i - 1);
        }
        const unsigned ff0 = spec.ff_coeff(0);
        next_.resize(static_cast<std::size_t>(n_states_) * 2);
        parity_.resize(static_cast<std::size_t>(n_states_) * 2);
        term_input_.resize(n_states_);
        for (int s = 0; s < n_states_; ++s) {
            const unsigned fb = parity_bit(static_cast<unsigned>(s) & fb_state_mask);
            term_input_[s] = static_cast<std::uint8_t>(fb);
            for (unsigned u = 0; u < 2; ++u) {
                const unsigned a = u ^ fb;
                next_[idx(s, u)] = static_cast<std::uint16_t>(((s << 1) | a) & (n_states_ - 1));
                parity_[idx(s, u)] = static_cast<std::uint8_t>(
                    (ff0 & a) ^ parity_bit(static_cast<unsigned>(s) & ff_state_mask));
            }
        }
    }

    int states() const { return n_states_; }
    int memory() const { return memory_; }
    int next(int state, unsigned input) const { return next_[idx(state, input)]; }
    std::uint8_t parity(int state, unsigned input) const { return parity_[idx(state, input)]; }
    /// Input that makes the new feedback value zero (one termination step).
    std::uint8_t termination_input(int state) const { return term_input_[state]; }

private:
    static unsigned parity_bit(unsigned v) { return std::popcount(v) & 1u; }
    std::size_t idx(int state, unsigned input) const {
        return static_cast<std::size_t>(state) * 2 + input;
    }

    int memory_;
    int n_states_;
    std::vector<std::uint16_t> next_;
    std::vector<std::uint8_t> parity_;
    std::vector<std::uint8_t> term_input_;
};

// Exact max-star: max(a,b) + log(1 + exp(-|a-b|)).
inline double max_star(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity())
        return b;
    if (b == -std::numeric_limits<double>::infinity())
        return a;
    const double d = std::abs(a - b);
    const double m = a > b ? a : b;
    // Below double resolution the correction contributes nothing.
    return d > 37.0 ? m : m + std::log1p(std::exp(-d));
}

} // namespace detail

/// Shift-register recursion with the feedback polynomial in the loop and the
/// feedforward polynomial on the parity taps. With termination, `memory` tail
/// inputs drive the state to zero and are appended to both streams.
inline RscCodeword rsc_encode(std::span<const std::uint8_t> bits, const ConvCodeSpec& spec) {
    const detail::Trellis trellis(spec);
    RscCodeword cw;
    const std::size_t tail = spec.terminated ? static_cast<std::size_t>(spec.memory) : 0;
    cw.systematic.reserve(bits.size() + tail);
    cw.parity.reserve(bits.size() + tail);

    int state = 0;
    for (std::uint8_t b : bits) {
        cw.systematic.push_back(b);
        cw.parity.push_back(trellis.parity(state, b));
        state = trellis.next(state, b);
    }
    for (std::size_t k = 0; k < tail; ++k) {
        const std::uint8_t u = trellis.termination_input(state);
        cw.systematic.push_back(u);
        cw.parity.push_back(trellis.parity(state, u));
        state = trellis.next(state, u);
    }
    return cw;
}

/// Final encoder state for a given input; zero after a terminated encode.
inline int rsc_final_state(std::span<const std::uint8_t> bits, const ConvCodeSpec& spec) {
    const detail::Trellis trellis(spec);
    int state = 0;
    for (std::uint8_t b : bits)
        state = trellis.next(state, b);
    if (spec.terminated)
        for (int k = 0; k < spec.memory; ++k)
            state = trellis.next(state, trellis.termination_input(state));
    return state;
}

/// Maximum-likelihood sequence decoding of one rate-1/2 RSC frame. llrs are
/// interleaved per trellis step as (systematic, parity); the decoded codeword
/// maximizes the correlation sum llr_i * (1 - 2 c_i). Metric ties pick the
/// survivor with the smaller predecessor state.
inline std::vector<std::uint8_t> viterbi_decode(const LlrFrame& llrs, const ConvCodeSpec& spec) {
    const detail::Trellis trellis(spec);
    if (llrs.values.size() % 2 != 0)
        throw LengthMismatch("viterbi_decode: odd LLR count for a rate-1/2 code");
    const std::size_t steps = llrs.values.size() / 2;
    const std::size_t tail = spec.terminated ? static_cast<std::size_t>(spec.memory) : 0;
    if (steps <= tail)
        throw LengthMismatch("viterbi_decode: frame shorter than the termination tail");
    const std::size_t info_len = steps - tail;

    const int n_states = trellis.states();
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<double> metric(n_states, kNegInf);
    std::vector<double> next_metric(n_states);
    metric[0] = 0.0;

    // survivor[k * n_states + s] = predecessor state of s at step k
    std::vector<std::int16_t> survivor(steps * n_states, -1);

    for (std::size_t k = 0; k < steps; ++k) {
        const double ls = llrs.values[2 * k];
        const double lp = llrs.values[2 * k + 1];
        std::fill(next_metric.begin(), next_metric.end(), kNegInf);
        for (int s = 0; s < n_states; ++s) {
            if (metric[s] == kNegInf)
                continue;
            for (unsigned u = 0; u < 2; ++u) {
                const int ns = trellis.next(s, u);
                const double branch = (u ? -ls : ls) + (trellis.parity(s, u) ? -lp : lp);
                const double cand = metric[s] + branch;
                auto& slot = next_metric[ns];
                auto& pred = survivor[k * n_states + ns];
                if (cand > slot || (cand == slot && s < pred)) {
                    slot = cand;
                    pred = static_cast<std::int16_t>(s);
                }
            }
        }
        metric.swap(next_metric);
    }

    int state = 0;
    if (!spec.terminated) {
        state = static_cast<int>(std::max_element(metric.begin(), metric.end()) - metric.begin());
    } else if (metric[0] == kNegInf) {
        throw LengthMismatch("viterbi_decode: zero state unreachable; trellis inconsistent");
    }

    std::vector<std::uint8_t> inputs(steps);
    for (std::size_t k = steps; k-- > 0;) {
        const int pred = survivor[k * n_states + state];
        // Recover the input that moves pred -> state.
        inputs[k] = trellis.next(pred, 0) == state ? 0 : 1;
        state = pred;
    }
    inputs.resize(info_len);
    return inputs;
}

/// Soft outputs of one log-MAP pass.
struct BcjrResult {
    std::vector<double> aposteriori; ///< full per-bit LLRs, info positions only
    std::vector<double> extrinsic;   ///< aposteriori minus apriori minus systematic channel LLR
};

/// Exact log-MAP (BCJR) for one rate-1/2 RSC frame. llrs are interleaved
/// (systematic, parity) over L + memory steps when terminated, L steps
/// otherwise; apriori has length L. Forward/backward recursions run in the
/// log domain with the exact max-star operation.
inline BcjrResult bcjr_decode(const LlrFrame& llrs, std::span<const double> apriori,
                              const ConvCodeSpec& spec) {
    const detail::Trellis trellis(spec);
    const std::size_t info_len = apriori.size();
    const std::size_t tail = spec.terminated ? static_cast<std::size_t>(spec.memory) : 0;
    const std::size_t steps = info_len + tail;
    if (llrs.values.size() != 2 * steps)
        throw LengthMismatch("bcjr_decode: LLR count does not match the trellis");
    if (info_len == 0)
        throw LengthMismatch("bcjr_decode: empty frame");

    const int n_states = trellis.states();
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    using detail::max_star;

    // Branch metric: 0.5*[(ls+la)(1-2u) + lp(1-2p)]; constants cancel in LLRs.
    auto half_sum = [&](std::size_t k) {
        const double la = k < info_len ? apriori[k] : 0.0;
        return 0.5 * (llrs.values[2 * k] + la);
    };

    std::vector<double> alpha((steps + 1) * n_states, kNegInf);
    alpha[0] = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double hs = half_sum(k);
        const double hp = 0.5 * llrs.values[2 * k + 1];
        double* cur = &alpha[k * n_states];
        double* nxt = &alpha[(k + 1) * n_states];
        for (int s = 0; s < n_states; ++s) {
            if (cur[s] == kNegInf)
                continue;
            for (unsigned u = 0; u < 2; ++u) {
                const double g = (u ? -hs : hs) + (trellis.parity(s, u) ? -hp : hp);
                double& slot = nxt[trellis.next(s, u)];
                slot = max_star(slot, cur[s] + g);
            }
        }
        // Normalize to keep magnitudes bounded over long frames.
        const double peak = *std::max_element(nxt, nxt + n_states);
        if (peak != kNegInf)
            for (int s = 0; s < n_states; ++s)
                nxt[s] -= peak;
    }

    std::vector<double> beta((steps + 1) * n_states, kNegInf);
    {
        double* last = &beta[steps * n_states];
        if (spec.terminated)
            last[0] = 0.0;
        else
            std::fill(last, last + n_states, 0.0);
    }
    for (std::size_t k = steps; k-- > 0;) {
        const double hs = half_sum(k);
        const double hp = 0.5 * llrs.values[2 * k + 1];
        double* cur = &beta[k * n_states];
        const double* nxt = &beta[(k + 1) * n_states];
        for (int s = 0; s < n_states; ++s) {
            double acc = kNegInf;
            for (unsigned u = 0; u < 2; ++u) {
                const double g = (u ? -hs : hs) + (trellis.parity(s, u) ? -hp : hp);
                acc = max_star(acc, g + nxt[trellis.next(s, u)]);
            }
            cur[s] = acc;
        }
        const double peak = *std::max_element(cur, cur + n_states);
        if (peak != kNegInf)
            for (int s = 0; s < n_states; ++s)
                cur[s] -= peak;
    }

    BcjrResult result;
    result.aposteriori.resize(info_len);
    result.extrinsic.resize(info_len);
    for (std::size_t k = 0; k < info_len; ++k) {
        const double hs = half_sum(k);
        const double hp = 0.5 * llrs.values[2 * k + 1];
        const double* a = &alpha[k * n_states];
        const double* b = &beta[(k + 1) * n_states];
        double num = kNegInf; // u = 0
        double den = kNegInf; // u = 1
        for (int s = 0; s < n_states; ++s) {
            if (a[s] == kNegInf)
                continue;
            for (unsigned u = 0; u < 2; ++u) {
                const double g = (u ? -hs : hs) + (trellis.parity(s, u) ? -hp : hp);
                const double v = a[s] + g + b[trellis.next(s, u)];
                if (u == 0)
                    num = max_star(num, v);
                else
                    den = max_star(den, v);
            }
        }
        const double llr = num - den;
        result.aposteriori[k] = llr;
        result.extrinsic[k] = llr - apriori[k] - llrs.values[2 * k];
    }
    return result;
}

} // namespace waterfall
