#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "waterfall/fer_model.hpp"
#include "waterfall/montecarlo.hpp"
#include "waterfall/scheme.hpp"
#include "waterfall/threshold.hpp"

namespace waterfall {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    unsigned threads = 0;
    std::uint64_t seed = 1;
};

namespace detail {

inline std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline auto uncoded_pd(std::size_t L) {
    return [L](double gamma) {
        return uncoded_detection_probability(Snr::from_linear(gamma), L);
    };
}

// Analytic uncoded error curve presented through the sample-curve interface.
struct AnalyticUncodedCurve {
    std::vector<double> grid;
    std::vector<double> fers;

    AnalyticUncodedCurve(std::size_t L, double start, double step, std::size_t count) {
        grid = make_linear_grid(start, step, count);
        fers.reserve(count);
        for (double g : grid)
            fers.push_back(1.0 - uncoded_pd(L)(g));
    }
    std::size_t size() const { return grid.size(); }
    double snr(std::size_t i) const { return grid[i]; }
    double fer(std::size_t i) const { return fers[i]; }
    bool all_errors(std::size_t i) const { return fers[i] >= 1.0; }
};

// Counts every per-sample access made through the curve interface.
template <class Curve>
struct CountingCurve {
    const Curve& inner;
    mutable std::uint64_t accesses = 0;

    std::size_t size() const { return inner.size(); }
    double snr(std::size_t i) const {
        ++accesses;
        return inner.snr(i);
    }
    double fer(std::size_t i) const {
        ++accesses;
        return inner.fer(i);
    }
    bool all_errors(std::size_t i) const {
        ++accesses;
        return inner.all_errors(i);
    }
};

inline SimulationPlan desk_plan(double start, double step, std::size_t count, std::uint64_t seed) {
    SimulationPlan plan;
    plan.snr_grid = make_linear_grid(start, step, count);
    plan.min_frames = 2000;
    plan.max_frames = 2000;
    plan.seed = seed;
    return plan;
}

inline std::vector<FerSample> to_fer_samples(const FerCurve& curve) {
    std::vector<FerSample> samples;
    samples.reserve(curve.size());
    for (const auto& p : curve.points)
        samples.push_back({p.snr_linear, p.fer});
    return samples;
}

} // namespace detail

/// 1. Analytic uncoded thresholds at L = 256 and 1024.
inline CriterionResult criterion_uncoded_thresholds() {
    detail::Stopwatch watch;
    CriterionResult r;
    r.id = 1;
    r.name = "analytic uncoded thresholds (L=256, L=1024)";
    const double db256 = waterfall_from_pd(detail::uncoded_pd(256)).gamma_w.db();
    const double t256 = watch.seconds();
    detail::Stopwatch watch1024;
    const double db1024 = waterfall_from_pd(detail::uncoded_pd(1024)).gamma_w.db();
    const double t1024 = watch1024.seconds();
    const bool values_ok = std::abs(db256 - 5.782) <= 0.005 && std::abs(db1024 - 7.083) <= 0.005;
    const bool time_ok = t256 < 1.0 && t1024 < 1.0;
    r.pass = values_ok && time_ok;
    r.detail = detail::fmt("gamma_w(256)=%.4f dB (want 5.782+-0.005), "
                           "gamma_w(1024)=%.4f dB (want 7.083+-0.005)",
                           db256, db1024);
    r.seconds = watch.seconds();
    return r;
}

/// 2. Step detection curves reproduce their step location.
inline CriterionResult criterion_step_identity() {
    detail::Stopwatch watch;
    CriterionResult r;
    r.id = 2;
    r.name = "step-function threshold identity";
    r.pass = true;
    std::string detail_text;
    for (double gamma_th : {0.1, 1.0, 10.0}) {
        auto step = [gamma_th](double gamma) { return gamma >= gamma_th ? 1.0 : 0.0; };
        const double gw = waterfall_from_pd(step).gamma_w.linear();
        const double rel = std::abs(gw - gamma_th) / gamma_th;
        if (rel > 1e-6)
            r.pass = false;
        detail_text += detail::fmt("step@%g -> %.8g (rel err %.2e)  ", gamma_th, gw, rel);
    }
    r.detail = detail_text;
    r.seconds = watch.seconds();
    r.pass = r.pass && r.seconds < 1.0;
    return r;
}

/// 3. Sample-based thresholds of the (1,17/15) convolutional code.
inline CriterionResult criterion_conv_thresholds(const AcceptanceOptions& options) {
    detail::Stopwatch watch;
    CriterionResult r;
    r.id = 3;
    r.name = "convolutional thresholds (L=256, L=1024)";
    double db[2];
    const std::size_t lengths[2] = {256, 1024};
    const double want[2] = {-0.983, 0.023};
    for (int i = 0; i < 2; ++i) {
        const SchemeSpec scheme = SchemeSpec::convolutional(lengths[i]);
        const SimulationPlan plan = detail::desk_plan(0.1, 0.1, 30, options.seed + i);
        const FerCurve curve = measure_awgn_fer(scheme, plan, options.threads);
        db[i] = waterfall_from_fer_samples(curve).gamma_w.db();
    }
    r.seconds = watch.seconds();
    r.pass = std::abs(db[0] - want[0]) <= 0.3 && std::abs(db[1] - want[1]) <= 0.3 &&
             r.seconds <= 600.0;
    r.detail = detail::fmt("gamma_w(256)=%.3f dB (want -0.983+-0.3), "
                           "gamma_w(1024)=%.3f dB (want 0.023+-0.3)",
                           db[0], db[1]);
    return r;
}

/// 4. Sample-based thresholds of the (1,5/7,5/7) turbo code and their
///    frame-length insensitivity.
inline CriterionResult criterion_turbo_thresholds(const AcceptanceOptions& options) {
    detail::Stopwatch watch;
    CriterionResult r;
    r.id = 4;
    r.name = "turbo thresholds (L=256, L=1024)";
    double db[2];
    const std::size_t lengths[2] = {256, 1024};
    const double want[2] = {-4.401, -4.312};
    for (int i = 0; i < 2; ++i) {
        const SchemeSpec scheme = SchemeSpec::turbo_scheme(lengths[i], 1, 8);
        const SimulationPlan plan = detail::desk_plan(0.05, 0.05, 20, options.seed + 10 + i);
        const FerCurve curve = measure_awgn_fer(scheme, plan, options.threads);
        db[i] = waterfall_from_fer_samples(curve).gamma_w.db();
    }
    r.seconds = watch.seconds();
    r.pass = std::abs(db[0] - want[0]) <= 0.3 && std::abs(db[1] - want[1]) <= 0.3 &&
             std::abs(db[0] - db[1]) < 0.3 && r.seconds <= 1800.0;
    r.detail = detail::fmt("gamma_w(256)=%.3f dB (want -4.401+-0.3), "
                           "gamma_w(1024)=%.3f dB (want -4.312+-0.3), split %.3f dB",
                           db[0], db[1], std::abs(db[0] - db[1]));
    return r;
}

namespace detail {

struct GapCheck {
    double gap_db = 0.0;
    double tolerance_db = 0.0;
    bool pass = false;
};

// Gap between an approximate curve and a measured curve at one FER level,
// allowing 0.4 dB plus half the Wilson-uncertainty corridor of the
// measurement at that level.
inline GapCheck check_gap(const std::vector<FerSample>& approx, const FerCurve& measured,
                          double level, double confidence) {
    std::vector<FerSample> mid, low, high;
    for (const auto& p : measured.points) {
        const ConfidenceInterval ci = binomial_ci(p.errors, p.frames, confidence);
        mid.push_back({p.snr_linear, p.fer});
        low.push_back({p.snr_linear, ci.low});
        high.push_back({p.snr_linear, ci.high});
    }
    GapCheck check;
    check.gap_db = snr_gap_at_fer(approx, mid, level);
    const double width_db = std::abs(detail::crossing_db(high, level) -
                                     detail::crossing_db(low, level));
    check.tolerance_db = 0.4 + 0.5 * width_db;
    check.pass = check.gap_db <= check.tolerance_db;
    return check;
}

} // namespace detail

/// 5. The step-profile approximation tracks measured quasi-static FER within
///    0.4 dB (plus measurement uncertainty) at FER levels 1e-1 and 1e-2.
///    The uncoded measurement is exposed for reuse by criterion 6.
inline CriterionResult criterion_approximation_accuracy(const AcceptanceOptions& options,
                                                        FerCurve* uncoded_qsf_out = nullptr) {
    detail::Stopwatch watch;
    CriterionResult r;
    r.id = 5;
    r.name = "0.4 dB approximation accuracy (uncoded, convolutional)";
    r.pass = true;
    std::string text;

    auto run_scheme = [&](const SchemeSpec& scheme, const WaterfallThreshold& threshold,
                          double start_db, double stop_db) {
        std::vector<Snr> grid;
        for (double db = start_db; db <= stop_db + 1e-9; db += 1.0)
            grid.push_back(Snr::from_db(db));
        FerCurve measured =
            measure_qsf_fer(scheme, grid, 10000, options.seed + 20, options.threads);
        std::vector<FerSample> approx;
        for (const Snr& avg : grid)
            approx.push_back({avg.linear(), approx_fer(avg, threshold)});
        for (double level : {1e-1, 1e-2}) {
            const detail::GapCheck check = detail::check_gap(approx, measured, level, 0.95);
            if (!check.pass)
                r.pass = false;
            text += detail::fmt("%s@FER=%g: gap %.3f dB (tol %.3f)  ", scheme.describe().c_str(),
                                level, check.gap_db, check.tolerance_db);
        }
        return measured;
    };

    const SchemeSpec uncoded = SchemeSpec::uncoded(256);
    FerCurve uncoded_qsf =
        run_scheme(uncoded, waterfall_from_pd(detail::uncoded_pd(256)), 10.0, 30.0);
    if (uncoded_qsf_out)
        *uncoded_qsf_out = std::move(uncoded_qsf);

    const SchemeSpec conv = SchemeSpec::convolutional(256);
    const SimulationPlan plan = detail::desk_plan(0.1, 0.1, 30, options.seed);
    const WaterfallThreshold conv_threshold =
        waterfall_from_fer_samples(measure_awgn_fer(conv, plan, options.threads));
    run_scheme(conv, conv_threshold, 2.0, 24.0);

    r.detail = text;
    r.seconds = watch.seconds();
    r.pass = r.pass && r.seconds <= 1200.0;
    return r;
}

/// 6. Exact fading integral agrees with quasi-static Monte Carlo within the
///    95% Wilson interval at five average-SNR points spanning 10-30 dB.
inline CriterionResult criterion_exact_integral_crosscheck(const AcceptanceOptions& options,
                                                           const FerCurve* reuse_qsf = nullptr) {
    detail::Stopwatch watch;
    CriterionResult r;
    r.id = 6;
    r.name = "exact integral vs quasi-static Monte Carlo (uncoded L=256)";
    const SchemeSpec scheme = SchemeSpec::uncoded(256);
    std::vector<Snr> grid;
    for (double db = 10.0; db <= 30.0 + 1e-9; db += 1.0)
        grid.push_back(Snr::from_db(db));
    const FerCurve measured =
        reuse_qsf ? *reuse_qsf
                  : measure_qsf_fer(scheme, grid, 10000, options.seed + 20, options.threads);

    auto pe = [](double gamma) {
        return 1.0 - uncoded_detection_probability(Snr::from_linear(gamma), 256);
    };
    r.pass = true;
    std::string text;
    for (double db : {10.0, 15.0, 20.0, 25.0, 30.0}) {
        const auto idx = static_cast<std::size_t>(db - 10.0);
        const FerPoint& p = measured.points[idx];
        const ConfidenceInterval ci = binomial_ci(p.errors, p.frames, 0.95);
        const double exact = exact_fer(pe, Snr::from_db(db));
        const bool inside = exact >= ci.low && exact <= ci.high;
        if (!inside)
            r.pass = false;
        text += detail::fmt("%gdB: exact %.4g in [%.4g,%.4g]%s  ", db, exact, ci.low, ci.high,
                            inside ? "" : " MISS");
    }
    r.detail = text;
    r.seconds = watch.seconds();
    return r;
}

/// 7. Decoder oracles: Viterbi vs exhaustive ML; BCJR vs brute-force
///    marginalization.
inline CriterionResult criterion_decoder_oracles() {
    detail::Stopwatch watch;
    CriterionResult r;
    r.id = 7;
    r.name = "decoder oracles (ML search, exact marginalization)";

    int ml_mismatches = 0;
    Rng rng = Rng::derive(0xACCE97, 7);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t L = 5 + trial % 4; // 5..8
        ConvCodeSpec spec = trial % 2 ? ConvCodeSpec::rsc_17_15() : ConvCodeSpec::rsc_5_7();
        std::vector<std::uint8_t> bits(L);
        for (auto& b : bits)
            b = rng.bit() ? 1 : 0;
        const RscCodeword cw = rsc_encode(bits, spec);
        LlrFrame llrs;
        const Snr gamma = Snr::from_linear(0.5);
        for (std::size_t k = 0; k < cw.systematic.size(); ++k) {
            const double s0 = cw.systematic[k] ? -1.0 : 1.0;
            const double s1 = cw.parity[k] ? -1.0 : 1.0;
            const double sigma = std::sqrt(1.0 / (2.0 * gamma.linear()));
            llrs.values.push_back(4.0 * gamma.linear() * (s0 + sigma * rng.gaussian()));
            llrs.values.push_back(4.0 * gamma.linear() * (s1 + sigma * rng.gaussian()));
        }

        // Exhaustive ML over all information words.
        double best = -1e300;
        std::vector<std::uint8_t> best_bits;
        for (std::uint64_t word = 0; word < (1ull << L); ++word) {
            std::vector<std::uint8_t> cand(L);
            for (std::size_t i = 0; i < L; ++i)
                cand[i] = (word >> i) & 1;
            const RscCodeword ccw = rsc_encode(cand, spec);
            double metric = 0.0;
            for (std::size_t k = 0; k < ccw.systematic.size(); ++k) {
                metric += llrs.values[2 * k] * (ccw.systematic[k] ? -1.0 : 1.0);
                metric += llrs.values[2 * k + 1] * (ccw.parity[k] ? -1.0 : 1.0);
            }
            if (metric > best) {
                best = metric;
                best_bits = cand;
            }
        }
        if (viterbi_decode(llrs, spec) != best_bits)
            ++ml_mismatches;
    }

    double worst_marginal_gap = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t L = 4;
        ConvCodeSpec spec = trial % 2 ? ConvCodeSpec::rsc_17_15() : ConvCodeSpec::rsc_5_7();
        spec.terminated = true;
        const std::size_t steps = L + spec.memory;
        LlrFrame llrs;
        std::vector<double> apriori(L);
        for (std::size_t i = 0; i < 2 * steps; ++i)
            llrs.values.push_back(2.0 * rng.gaussian());
        for (auto& a : apriori)
            a = rng.gaussian();

        std::vector<double> p0(L, 0.0);
        double z = 0.0;
        for (std::uint64_t word = 0; word < (1ull << L); ++word) {
            std::vector<std::uint8_t> cand(L);
            for (std::size_t i = 0; i < L; ++i)
                cand[i] = (word >> i) & 1;
            const RscCodeword ccw = rsc_encode(cand, spec);
            double logw = 0.0;
            for (std::size_t k = 0; k < steps; ++k) {
                logw += 0.5 * llrs.values[2 * k] * (ccw.systematic[k] ? -1.0 : 1.0);
                logw += 0.5 * llrs.values[2 * k + 1] * (ccw.parity[k] ? -1.0 : 1.0);
            }
            for (std::size_t i = 0; i < L; ++i)
                logw += 0.5 * apriori[i] * (cand[i] ? -1.0 : 1.0);
            const double w = std::exp(logw);
            z += w;
            for (std::size_t i = 0; i < L; ++i)
                if (cand[i] == 0)
                    p0[i] += w;
        }
        const BcjrResult result = bcjr_decode(llrs, apriori, spec);
        for (std::size_t i = 0; i < L; ++i) {
            const double p_bcjr = 1.0 / (1.0 + std::exp(-result.aposteriori[i]));
            worst_marginal_gap = std::max(worst_marginal_gap, std::abs(p_bcjr - p0[i] / z));
        }
    }

    r.seconds = watch.seconds();
    r.pass = ml_mismatches == 0 && worst_marginal_gap <= 1e-8 && r.seconds < 60.0;
    r.detail = detail::fmt("ML mismatches %d/1000, worst marginal gap %.2e", ml_mismatches,
                           worst_marginal_gap);
    return r;
}

/// 8. Area under the normalized detection curve equals 1/gamma_w.
inline CriterionResult criterion_area_identity() {
    detail::Stopwatch watch;
    CriterionResult r;
    r.id = 8;
    r.name = "performance-plot area identity (uncoded L=256)";
    DetectionCurve curve;
    curve.source = DetectionCurve::Source::analytic;
    for (double gamma = 0.05; gamma <= 2000.0; gamma += 0.05)
        curve.points.emplace_back(gamma, detail::uncoded_pd(256)(gamma));
    const NormalizedCurve normalized = normalized_detection_curve(curve);
    const double area = trapezoid_area(normalized.normalized);
    const double inverse_gw = 1.0 / waterfall_from_pd(detail::uncoded_pd(256)).gamma_w.linear();
    const double rel = std::abs(area - inverse_gw) / inverse_gw;
    r.pass = rel <= 0.01;
    r.detail = detail::fmt("area %.6f vs 1/gamma_w %.6f (rel err %.4f)", area, inverse_gw, rel);
    r.seconds = watch.seconds();
    return r;
}

/// 9. Threshold-plus-approximation touches O(N + M) samples; exact per-point
///    integration touches at least N*M.
inline CriterionResult criterion_complexity_counts() {
    detail::Stopwatch watch;
    CriterionResult r;
    r.id = 9;
    r.name = "O(N+M) complexity instrumentation";
    const std::size_t N = 1000;
    const std::size_t M = 1000;

    // Synthetic but well-formed measured curve from the analytic uncoded FER.
    FerCurve curve;
    const auto grid = make_linear_grid(0.012, 0.012, N);
    for (double gamma : grid) {
        FerPoint p;
        p.snr_linear = gamma;
        p.frames = 1000000;
        p.errors = static_cast<std::uint64_t>(
            std::llround((1.0 - detail::uncoded_pd(256)(gamma)) * 1e6));
        p.fer = static_cast<double>(p.errors) / static_cast<double>(p.frames);
        curve.points.push_back(p);
    }

    detail::CountingCurve<FerCurve> counted{curve};
    const WaterfallThreshold threshold = waterfall_from_fer_samples(counted);
    std::vector<double> approx(M);
    for (std::size_t j = 0; j < M; ++j)
        approx[j] = approx_fer(Snr::from_db(0.03 * static_cast<double>(j)), threshold);
    const std::uint64_t fast_accesses = counted.accesses;

    counted.accesses = 0;
    double checksum = 0.0;
    for (std::size_t j = 0; j < M; ++j)
        checksum += exact_fer_from_samples(counted, Snr::from_db(0.03 * static_cast<double>(j)));
    const std::uint64_t exact_accesses = counted.accesses;

    r.pass = fast_accesses <= N + 10 * M && exact_accesses >= static_cast<std::uint64_t>(N) * M;
    r.detail = detail::fmt("threshold+approx: %llu accesses (cap %zu); exact grid: %llu "
                           "(floor %zu); checksum %.3f",
                           static_cast<unsigned long long>(fast_accesses), N + 10 * M,
                           static_cast<unsigned long long>(exact_accesses), N * M, checksum);
    r.seconds = watch.seconds();
    r.pass = r.pass && r.seconds < 1.0;
    return r;
}

/// Runs every acceptance criterion, streaming one pass/fail line per
/// criterion to `progress` as results arrive.
inline std::vector<CriterionResult> run_acceptance_criteria(const AcceptanceOptions& options,
                                                            std::ostream* progress = nullptr) {
    std::vector<CriterionResult> results;
    auto emit = [&](CriterionResult r) {
        if (progress)
            *progress << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ": " << r.name << " -- "
                      << r.detail << detail::fmt(" (%.1f s)", r.seconds) << "\n"
                      << std::flush;
        results.push_back(std::move(r));
    };

    emit(criterion_uncoded_thresholds());
    emit(criterion_step_identity());
    emit(criterion_conv_thresholds(options));
    emit(criterion_turbo_thresholds(options));

    // Criterion 6 reuses the uncoded quasi-static curve measured for 5
    // (same scheme, grid, frame count and seed).
    FerCurve uncoded_qsf;
    emit(criterion_approximation_accuracy(options, &uncoded_qsf));
    emit(criterion_exact_integral_crosscheck(options, &uncoded_qsf));

    emit(criterion_decoder_oracles());
    emit(criterion_area_identity());
    emit(criterion_complexity_counts());
    return results;
}

inline bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass)
            return false;
    return true;
}

} // namespace waterfall
