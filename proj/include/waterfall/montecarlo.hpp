#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "waterfall/channel.hpp"
#include "waterfall/numerics.hpp"
#include "waterfall/scheme.hpp"
#include "waterfall/snr.hpp"

namespace waterfall {

/// Equally spaced linear-SNR grid [start, start+step, ...], `count` points.
inline std::vector<double> make_linear_grid(double start, double step, std::size_t count) {
    if (!(start > 0.0) || !(step > 0.0) || count < 1)
        throw std::invalid_argument("make_linear_grid: start > 0, step > 0, count >= 1");
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = start + static_cast<double>(i) * step;
    return grid;
}

/// Grid spacing if the points are equally spaced (relative deviation below
/// 1e-9), otherwise throws.
inline double grid_spacing(std::span<const double> grid) {
    if (grid.size() < 2)
        throw std::invalid_argument("grid_spacing: need at least two points");
    const double step = grid[1] - grid[0];
    if (!(step > 0.0))
        throw std::invalid_argument("grid_spacing: grid must be strictly increasing");
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double d = grid[i + 1] - grid[i];
        if (std::abs(d - step) > 1e-9 * std::max(std::abs(step), std::abs(d)))
            throw std::invalid_argument("grid_spacing: grid is not equally spaced");
    }
    return step;
}

struct SimulationPlan {
    std::vector<double> snr_grid; ///< linear scale, equally spaced, increasing
    std::uint64_t min_frames = 2000;
    std::uint64_t max_frames = 2000;
    std::uint64_t target_errors = UINT64_MAX;
    std::uint64_t seed = 1;

    void validate() const {
        if (snr_grid.empty())
            throw std::invalid_argument("SimulationPlan: empty SNR grid");
        if (snr_grid.size() >= 2)
            grid_spacing(snr_grid); // throws unless equally spaced
        if (snr_grid.front() <= 0.0)
            throw std::invalid_argument("SimulationPlan: SNR grid must be positive");
        if (min_frames < 1 || max_frames < min_frames || target_errors < 1)
            throw std::invalid_argument("SimulationPlan: need min_frames >= 1, "
                                        "max_frames >= min_frames, target_errors >= 1");
    }
};

struct FerPoint {
    double snr_linear = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t errors = 0;
    double fer = 0.0;
    /// "FER = 1" in the waterfall sense: no successful frame was observed.
    bool all_errors() const { return errors == frames; }
};

/// Measured frame error rates over an SNR grid.
struct FerCurve {
    std::vector<FerPoint> points;

    std::size_t size() const { return points.size(); }
    double snr(std::size_t i) const { return points[i].snr_linear; }
    double fer(std::size_t i) const { return points[i].fer; }
    std::uint64_t frames(std::size_t i) const { return points[i].frames; }
    std::uint64_t errors(std::size_t i) const { return points[i].errors; }
    bool all_errors(std::size_t i) const { return points[i].all_errors(); }

    std::uint64_t total_frames() const {
        std::uint64_t n = 0;
        for (const auto& p : points)
            n += p.frames;
        return n;
    }
};

namespace detail {

// Frames are processed in fixed-size blocks; stopping conditions are checked
// at block boundaries only. Block size is a constant of the algorithm, so
// counts do not depend on the number of worker threads.
inline constexpr std::uint64_t kFrameBlock = 256;

template <class Trial>
FerPoint run_point(double snr_linear, std::uint64_t min_frames, std::uint64_t max_frames,
                   std::uint64_t target_errors, Trial&& trial, unsigned threads) {
    FerPoint point;
    point.snr_linear = snr_linear;
    std::uint64_t frames = 0;
    std::uint64_t errors = 0;
    while (frames < max_frames) {
        const std::uint64_t block = std::min(kFrameBlock, max_frames - frames);
        std::atomic<std::uint64_t> block_errors{0};
        if (threads <= 1 || block < 32) {
            std::uint64_t e = 0;
            for (std::uint64_t j = 0; j < block; ++j)
                e += trial(frames + j) ? 0 : 1;
            block_errors += e;
        } else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            std::atomic<std::uint64_t> cursor{0};
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&] {
                    std::uint64_t e = 0;
                    for (;;) {
                        const std::uint64_t j = cursor.fetch_add(1);
                        if (j >= block)
                            break;
                        e += trial(frames + j) ? 0 : 1;
                    }
                    block_errors += e;
                });
            for (auto& th : pool)
                th.join();
        }
        frames += block;
        errors += block_errors.load();
        if (frames >= min_frames && errors >= target_errors)
            break;
    }
    point.frames = frames;
    point.errors = errors;
    point.fer = static_cast<double>(errors) / static_cast<double>(frames);
    return point;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace detail

/// AWGN FER over the plan's grid: at each point, frames run until max_frames,
/// or until target_errors errors have been seen and at least min_frames were
/// sent. The RNG of frame j at grid point i is a pure function of
/// (seed, i, j), so results do not depend on thread count.
inline FerCurve measure_awgn_fer(const SchemeSpec& scheme, const SimulationPlan& plan,
                                 unsigned threads = 0) {
    scheme.validate();
    plan.validate();
    const unsigned n_threads = detail::resolve_threads(threads);
    FerCurve curve;
    curve.points.reserve(plan.snr_grid.size());
    for (std::size_t i = 0; i < plan.snr_grid.size(); ++i) {
        const Snr gamma = Snr::from_linear(plan.snr_grid[i]);
        auto trial = [&, gamma](std::uint64_t j) {
            Rng rng = Rng::derive(plan.seed, i, j);
            return transmit_and_detect(scheme, gamma, rng);
        };
        curve.points.push_back(detail::run_point(plan.snr_grid[i], plan.min_frames,
                                                 plan.max_frames, plan.target_errors, trial,
                                                 n_threads));
    }
    return curve;
}

/// Quasi-static fading FER: each frame first draws its instantaneous SNR from
/// the fading distribution at the given average SNR, then runs one AWGN trial
/// at that SNR.
inline FerCurve measure_qsf_fer(const SchemeSpec& scheme, std::span<const Snr> avg_snr_grid,
                                std::uint64_t frames_per_point, std::uint64_t seed,
                                unsigned threads = 0) {
    scheme.validate();
    if (avg_snr_grid.empty())
        throw std::invalid_argument("measure_qsf_fer: empty grid");
    if (frames_per_point < 1)
        throw std::invalid_argument("measure_qsf_fer: frames_per_point must be >= 1");
    const unsigned n_threads = detail::resolve_threads(threads);
    FerCurve curve;
    curve.points.reserve(avg_snr_grid.size());
    for (std::size_t i = 0; i < avg_snr_grid.size(); ++i) {
        const Snr avg = avg_snr_grid[i];
        if (avg.linear() <= 0.0)
            throw InvalidSnr("measure_qsf_fer: average SNR must be positive");
        auto trial = [&, avg](std::uint64_t j) {
            Rng rng = Rng::derive(seed, i + 0x51534600ull, j); // distinct from AWGN streams
            const Snr gamma = sample_instantaneous_snr(avg, rng);
            if (gamma.linear() <= 0.0)
                return false;
            return transmit_and_detect(scheme, gamma, rng);
        };
        curve.points.push_back(detail::run_point(avg.linear(), frames_per_point, frames_per_point,
                                                 UINT64_MAX, trial, n_threads));
    }
    return curve;
}

struct ConfidenceInterval {
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval for a binomial proportion.
inline ConfidenceInterval binomial_ci(std::uint64_t errors, std::uint64_t trials,
                                      double confidence) {
    if (trials < 1 || errors > trials)
        throw std::invalid_argument("binomial_ci: need 0 <= errors <= trials, trials >= 1");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("binomial_ci: confidence must lie in (0,1)");
    const double z = normal_quantile(0.5 + confidence / 2.0);
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

} // namespace waterfall
