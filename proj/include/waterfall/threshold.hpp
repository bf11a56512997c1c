#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "waterfall/errors.hpp"
#include "waterfall/montecarlo.hpp"
#include "waterfall/numerics.hpp"
#include "waterfall/snr.hpp"

namespace waterfall {

enum class ThresholdMethod { closed_form, continuous_error_form, sample_based };

inline const char* to_string(ThresholdMethod m) {
    switch (m) {
    case ThresholdMethod::closed_form: return "closed_form";
    case ThresholdMethod::continuous_error_form: return "continuous_error_form";
    case ThresholdMethod::sample_based: return "sample_based";
    }
    return "?";
}

/// SNR value splitting the low/high-SNR regions such that a unit-step error
/// profile at gamma_w reproduces the average fading FER.
struct WaterfallThreshold {
    Snr gamma_w = Snr::from_linear(1.0);
    ThresholdMethod method = ThresholdMethod::closed_form;
    std::string inputs_digest;
    /// First grid index with a successful frame, 1-based as in the discrete
    /// estimator; present for sample_based thresholds only.
    std::optional<std::size_t> k_index;
};

/// gamma_w = (integral of pd(gamma)/gamma^2 over (0, inf))^-1. The integral
/// is split at gamma = 1: adaptive quadrature on (0, 1], then the 1/gamma
/// substitution for [1, inf). pd must vanish fast enough at 0 for the
/// integral to exist.
template <class Pd>
WaterfallThreshold waterfall_from_pd(Pd&& pd, const QuadratureConfig& cfg = {},
                                     std::string digest = "pd") {
    auto integrand = [&pd](double gamma) { return pd(gamma) / (gamma * gamma); };
    const double area =
        integrate_finite(integrand, 0.0, 1.0, cfg) + integrate_semi_infinite(integrand, 1.0, cfg);
    if (!(area > 0.0))
        throw DegenerateInput("waterfall_from_pd: detection curve carries no mass");
    return {Snr::from_linear(1.0 / area), ThresholdMethod::closed_form, std::move(digest), {}};
}

/// gamma_w = (1/gamma' - integral of pe(gamma)/gamma^2 over [gamma', inf))^-1,
/// valid when pe = 1 below gamma'. Equivalent to the detection-probability
/// form but needs the error curve only where it is still decaying.
template <class Pe>
WaterfallThreshold waterfall_from_pe_continuous(Pe&& pe, Snr gamma_prime,
                                                const QuadratureConfig& cfg = {},
                                                std::string digest = "pe") {
    const double gp = gamma_prime.linear();
    if (gp <= 0.0)
        throw InvalidSnr("waterfall_from_pe_continuous: gamma' must be positive");
    auto integrand = [&pe](double gamma) { return pe(gamma) / (gamma * gamma); };
    double tail = 0.0;
    if (gp < 1.0)
        tail = integrate_finite(integrand, gp, 1.0, cfg) + integrate_semi_infinite(integrand, 1.0, cfg);
    else
        tail = integrate_semi_infinite(integrand, gp, cfg);
    const double bracket = 1.0 / gp - tail;
    // The subtraction cannot be resolved below the quadrature tolerance; a
    // bracket indistinguishable from zero means pe does not really decay.
    if (bracket <= std::max(cfg.abs_tol, cfg.rel_tol * (1.0 / gp + std::abs(tail))))
        throw DegenerateInput("waterfall_from_pe_continuous: error curve does not decay "
                              "beyond gamma'");
    return {Snr::from_linear(1.0 / bracket), ThresholdMethod::continuous_error_form,
            std::move(digest), {}};
}

struct SampleThresholdOptions {
    /// Require fer(gamma_N)/gamma_N <= 0.01 * bracket, i.e. the truncated
    /// high-SNR tail cannot move the threshold by more than about 1%.
    bool enforce_tail_coverage = true;
};

/// Discrete estimator on a measured AWGN FER curve with equal grid spacing:
/// gamma_w = (2/(gamma_{k-1}+gamma_k) - sum_{i>=k} fer_i/gamma_i^2 * step)^-1
/// where k is the first point with at least one successful frame. "fer = 1"
/// means zero successes were observed among that point's frames.
template <class Curve>
WaterfallThreshold waterfall_from_fer_samples(const Curve& curve,
                                              const SampleThresholdOptions& options = {}) {
    const std::size_t n = curve.size();
    if (n == 0)
        throw EmptyCurve("waterfall_from_fer_samples: empty curve");
    if (n < 2)
        throw std::invalid_argument("waterfall_from_fer_samples: need at least two grid points");

    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = curve.snr(i);
    const double step = grid_spacing(grid);

    std::size_t k = 0;
    while (k < n && curve.all_errors(k))
        ++k;
    if (k == n)
        throw NoConvergedRegion("waterfall_from_fer_samples: every point still has FER = 1; "
                                "extend the grid toward higher SNR");
    if (k == 0)
        throw NoWaterfallRegion("waterfall_from_fer_samples: no point with FER = 1; "
                                "extend the grid toward lower SNR");

    double sum = 0.0;
    for (std::size_t i = k; i < n; ++i)
        sum += curve.fer(i) / (curve.snr(i) * curve.snr(i));
    sum *= step;

    const double bracket = 2.0 / (curve.snr(k - 1) + curve.snr(k)) - sum;
    if (bracket <= 0.0)
        throw DegenerateInput("waterfall_from_fer_samples: non-positive bracket; the grid "
                              "truncates too much high-SNR tail");
    if (options.enforce_tail_coverage) {
        const double tail_bound = curve.fer(n - 1) / curve.snr(n - 1);
        if (tail_bound > 0.01 * bracket)
            throw DegenerateInput("waterfall_from_fer_samples: last grid point still has "
                                  "significant FER; extend the grid toward higher SNR");
    }

    char digest[96];
    std::snprintf(digest, sizeof digest, "fer_samples[N=%zu, snr=%.6g..%.6g]", n, grid.front(),
                  grid.back());
    return {Snr::from_linear(1.0 / bracket), ThresholdMethod::sample_based, digest, k + 1};
}

} // namespace waterfall
