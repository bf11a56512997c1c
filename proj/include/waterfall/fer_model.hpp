#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "waterfall/errors.hpp"
#include "waterfall/numerics.hpp"
#include "waterfall/snr.hpp"
#include "waterfall/threshold.hpp"

namespace waterfall {

/// Sampled probability of successful frame detection vs instantaneous SNR.
struct DetectionCurve {
    enum class Source { analytic, monte_carlo };
    std::vector<std::pair<double, double>> points; ///< (gamma linear, P_d)
    Source source = Source::analytic;
};

/// Step-profile approximation: FER on the quasi-static channel is the
/// probability that the instantaneous SNR falls below the waterfall
/// threshold, 1 - exp(-gamma_w/avg).
inline double approx_fer(Snr avg_snr, const WaterfallThreshold& threshold) {
    if (avg_snr.linear() <= 0.0)
        throw InvalidSnr("approx_fer: average SNR must be positive");
    return -std::expm1(-threshold.gamma_w.linear() / avg_snr.linear());
}

/// Average FER over the fading distribution: integral of pe(gamma) times the
/// exponential SNR density. Quadrature runs to 40*avg; the remainder is
/// bounded by exp(-40) and ignored. Initial segments double geometrically
/// from 1 so that error-curve structure near the origin is resolved even
/// when the fading scale is orders of magnitude larger.
template <class Pe>
double exact_fer(Pe&& pe, Snr avg_snr, const QuadratureConfig& cfg = {}) {
    const double mean = avg_snr.linear();
    if (mean <= 0.0)
        throw InvalidSnr("exact_fer: average SNR must be positive");
    auto integrand = [&pe, mean](double gamma) {
        return pe(gamma) * std::exp(-gamma / mean) / mean;
    };
    const double upper = 40.0 * mean;
    std::vector<double> breakpoints{0.0};
    for (double b = std::min(1.0, upper); b < upper; b *= 2.0)
        breakpoints.push_back(b);
    breakpoints.push_back(upper);
    return integrate_segmented(integrand, breakpoints, cfg);
}

/// Average FER from a sampled AWGN FER curve. The curve is treated as 1
/// below its first point, log-linearly interpolated between samples (linear
/// when a sample is zero), and extended beyond the last point gamma_N by the
/// decaying tail model fer_N * (gamma_N/gamma) * exp(-(gamma-gamma_N)).
/// Within the sampled range each segment integrates in closed form against
/// the fading density, so one evaluation touches every sample exactly once.
template <class Curve>
double exact_fer_from_samples(const Curve& curve, Snr avg_snr, const QuadratureConfig& cfg = {}) {
    const std::size_t n = curve.size();
    if (n == 0)
        throw EmptyCurve("exact_fer_from_samples: empty curve");
    const double mean = avg_snr.linear();
    if (mean <= 0.0)
        throw InvalidSnr("exact_fer_from_samples: average SNR must be positive");

    // pe = 1 on (0, gamma_1).
    double total = -std::expm1(-curve.snr(0) / mean);

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double g0 = curve.snr(i);
        const double g1 = curve.snr(i + 1);
        const double f0 = curve.fer(i);
        const double f1 = curve.fer(i + 1);
        if (!(g1 > g0))
            throw std::invalid_argument("exact_fer_from_samples: grid must be increasing");
        const double width = g1 - g0;
        const double damp = std::exp(-g0 / mean);
        if (f0 > 0.0 && f1 > 0.0) {
            // pe(u) = f0 * exp(s*u) on u in [0, width]
            const double s = std::log(f1 / f0) / width;
            const double r = s - 1.0 / mean;
            const double j = std::abs(r * width) < 1e-12
                                 ? width * (1.0 + 0.5 * r * width)
                                 : std::expm1(r * width) / r;
            total += f0 * damp * j / mean;
        } else {
            // pe(u) = f0 + b*u
            const double b = (f1 - f0) / width;
            const double decay = std::exp(-width / mean);
            total += damp * (f0 * (1.0 - decay) + b * (mean * (1.0 - decay) - width * decay));
        }
    }

    const double gn = curve.snr(n - 1);
    const double fn = curve.fer(n - 1);
    if (fn > 0.0) {
        auto tail = [fn, gn, mean](double gamma) {
            return fn * (gn / gamma) * std::exp(-(gamma - gn)) * std::exp(-gamma / mean) / mean;
        };
        total += integrate_semi_infinite(tail, gn, cfg);
    }
    return total;
}

/// (gamma, P_d/gamma^2) pairs plus the ideal envelope 1/gamma^2 on the same
/// grid. Areas under these curves order schemes by waterfall threshold.
struct NormalizedCurve {
    std::vector<std::pair<double, double>> normalized;
    std::vector<std::pair<double, double>> envelope;
};

inline NormalizedCurve normalized_detection_curve(const DetectionCurve& curve) {
    NormalizedCurve out;
    out.normalized.reserve(curve.points.size());
    out.envelope.reserve(curve.points.size());
    double prev = 0.0;
    for (const auto& [gamma, pd] : curve.points) {
        if (gamma <= 0.0)
            throw DegenerateInput("normalized_detection_curve: gamma must be positive");
        if (gamma <= prev)
            throw std::invalid_argument("normalized_detection_curve: grid must be increasing");
        prev = gamma;
        out.normalized.emplace_back(gamma, pd / (gamma * gamma));
        out.envelope.emplace_back(gamma, 1.0 / (gamma * gamma));
    }
    return out;
}

/// Trapezoid area under a sampled curve.
inline double trapezoid_area(std::span<const std::pair<double, double>> points) {
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        area += 0.5 * (points[i].second + points[i + 1].second) *
                (points[i + 1].first - points[i].first);
    return area;
}

/// One (average SNR, FER) sample of a fading performance curve.
struct FerSample {
    double avg_snr_linear;
    double fer;
};

namespace detail {

inline double crossing_db(std::span<const FerSample> curve, double level) {
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double f0 = curve[i].fer;
        const double f1 = curve[i + 1].fer;
        if (f0 == level)
            return Snr::from_linear(curve[i].avg_snr_linear).db();
        const bool brackets = (f0 > level && f1 < level) || (f0 < level && f1 > level);
        if (!brackets || !(f0 > 0.0) || !(f1 > 0.0))
            continue;
        const double t = (std::log10(level) - std::log10(f0)) / (std::log10(f1) - std::log10(f0));
        const double db0 = Snr::from_linear(curve[i].avg_snr_linear).db();
        const double db1 = Snr::from_linear(curve[i + 1].avg_snr_linear).db();
        return db0 + t * (db1 - db0);
    }
    if (!curve.empty() && curve.back().fer == level)
        return Snr::from_linear(curve.back().avg_snr_linear).db();
    throw LevelNotBracketed("snr_gap_at_fer: curve does not bracket the requested FER level");
}

} // namespace detail

/// Horizontal distance in dB between two FER-vs-average-SNR curves at a given
/// FER level, each crossing located by log-linear interpolation.
inline double snr_gap_at_fer(std::span<const FerSample> curve_a, std::span<const FerSample> curve_b,
                             double fer_level) {
    if (!(fer_level > 0.0 && fer_level < 1.0))
        throw std::invalid_argument("snr_gap_at_fer: level must lie in (0,1)");
    return std::abs(detail::crossing_db(curve_a, fer_level) -
                    detail::crossing_db(curve_b, fer_level));
}

} // namespace waterfall
