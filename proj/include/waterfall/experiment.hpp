#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "waterfall/csv.hpp"
#include "waterfall/errors.hpp"
#include "waterfall/fer_model.hpp"
#include "waterfall/montecarlo.hpp"
#include "waterfall/scheme.hpp"
#include "waterfall/threshold.hpp"

namespace waterfall {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Flat "[section]" + "key = value" file; '#' and ';' start comments.
inline std::map<std::string, std::string> parse_flat_config(std::istream& is) {
    std::map<std::string, std::string> entries;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos)
            line.erase(comment);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        entries[section + "." + key] = value;
    }
    return entries;
}

class ConfigReader {
public:
    explicit ConfigReader(std::map<std::string, std::string> entries)
        : entries_(std::move(entries)) {}

    std::optional<std::string> raw(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return std::nullopt;
        consumed_.insert(consumed_.end(), key);
        return it->second;
    }

    std::string str(const std::string& key, const std::string& fallback) {
        return raw(key).value_or(fallback);
    }

    double number(const std::string& key, double fallback) {
        const auto v = raw(key);
        if (!v)
            return fallback;
        try {
            std::size_t pos = 0;
            const double parsed = std::stod(*v, &pos);
            if (pos != v->size())
                throw ConfigError("");
            return parsed;
        } catch (...) {
            throw ConfigError("config key '" + key + "': not a number: " + *v);
        }
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback, int base = 10) {
        const auto v = raw(key);
        if (!v)
            return fallback;
        try {
            std::size_t pos = 0;
            const std::uint64_t parsed = std::stoull(*v, &pos, base);
            if (pos != v->size())
                throw ConfigError("");
            return parsed;
        } catch (...) {
            throw ConfigError("config key '" + key + "': not a valid integer: " + *v);
        }
    }

    bool flag(const std::string& key, bool fallback) {
        const auto v = raw(key);
        if (!v)
            return fallback;
        if (*v == "true" || *v == "1" || *v == "yes")
            return true;
        if (*v == "false" || *v == "0" || *v == "no")
            return false;
        throw ConfigError("config key '" + key + "': expected true/false");
    }

    void reject_unknown() const {
        for (const auto& [key, value] : entries_) {
            bool known = false;
            for (const auto& k : consumed_)
                if (k == key)
                    known = true;
            if (!known)
                throw ConfigError("config: unknown key '" + key + "'");
        }
    }

private:
    std::map<std::string, std::string> entries_;
    std::vector<std::string> consumed_;
};

} // namespace detail

/// AWGN measurement plan as configured: grid endpoints in dB (the human
/// convention), spacing in linear SNR (the discrete threshold estimator needs equal
/// linear spacing).
struct PlanConfig {
    double grid_start_db = -10.0;
    double grid_stop_db = 4.7712125471966244; // linear 3.0
    double grid_step_linear = 0.1;
    std::uint64_t min_frames = 2000;
    std::uint64_t max_frames = 2000;
    std::uint64_t target_errors = UINT64_MAX;
    std::uint64_t seed = 1;

    SimulationPlan to_plan() const {
        const double start = std::pow(10.0, grid_start_db / 10.0);
        const double stop = std::pow(10.0, grid_stop_db / 10.0);
        if (!(start > 0.0) || !(stop >= start) || !(grid_step_linear > 0.0))
            throw ConfigError("plan: need grid_start_db <= grid_stop_db and a positive step");
        const auto count =
            static_cast<std::size_t>(std::floor((stop - start) / grid_step_linear + 1.0 + 1e-9));
        SimulationPlan plan;
        plan.snr_grid = make_linear_grid(start, grid_step_linear, count);
        plan.min_frames = min_frames;
        plan.max_frames = max_frames;
        plan.target_errors = target_errors;
        plan.seed = seed;
        return plan;
    }
};

/// Average-SNR sweep for the fading channel.
struct FadingConfig {
    double avg_start_db = 0.0;
    double avg_stop_db = 30.0;
    double avg_step_db = 1.0;
    std::uint64_t frames_per_point = 10000;
    double confidence = 0.95;

    std::vector<Snr> grid() const {
        if (!(avg_step_db > 0.0) || !(avg_stop_db >= avg_start_db))
            throw ConfigError("fading: need avg_start_db <= avg_stop_db and a positive step");
        std::vector<Snr> points;
        const auto count =
            static_cast<std::size_t>(std::floor((avg_stop_db - avg_start_db) / avg_step_db + 1.0 + 1e-9));
        points.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            points.push_back(Snr::from_db(avg_start_db + static_cast<double>(i) * avg_step_db));
        return points;
    }
};

struct OutputConfig {
    std::string directory = "out";
    std::string format = "structured"; ///< threshold report style: structured | csv
};

struct ExperimentConfig {
    SchemeSpec scheme;
    PlanConfig plan;
    FadingConfig fading;
    OutputConfig output;
    std::vector<std::size_t> perfplot_frame_lengths; ///< extra uncoded curves for one run
    std::string perfplot_curve_csv; ///< stored AWGN FER curve to plot instead of measuring

    static ExperimentConfig parse(std::istream& is) {
        detail::ConfigReader reader(detail::parse_flat_config(is));
        ExperimentConfig config;

        const std::string kind = reader.str("scheme.kind", "");
        if (kind.empty())
            throw ConfigError("config: [scheme] kind is required");
        const auto L =
            static_cast<std::size_t>(reader.integer("scheme.frame_length", 0));
        if (L == 0)
            throw ConfigError("config: [scheme] frame_length is required");

        if (kind == "uncoded") {
            config.scheme = SchemeSpec::uncoded(L);
            config.plan.grid_start_db = -10.0; // linear 0.1
            config.plan.grid_stop_db = 10.791812460476249; // linear 12.0
            config.plan.grid_step_linear = 0.1;
        } else if (kind == "convolutional") {
            ConvCodeSpec code = ConvCodeSpec::rsc_17_15();
            code.feedforward = static_cast<unsigned>(reader.integer("scheme.feedforward", 017, 8));
            code.feedback = static_cast<unsigned>(reader.integer("scheme.feedback", 015, 8));
            code.memory = static_cast<int>(reader.integer("scheme.memory", 3));
            code.terminated = reader.flag("scheme.terminated", true);
            config.scheme = SchemeSpec::convolutional(L, code);
            config.plan.grid_start_db = -10.0; // linear 0.1
            config.plan.grid_stop_db = 4.7712125471966244; // linear 3.0
            config.plan.grid_step_linear = 0.1;
        } else if (kind == "turbo") {
            const auto iterations = static_cast<int>(reader.integer("scheme.iterations", 8));
            const std::uint64_t interleaver_seed = reader.integer("scheme.interleaver_seed", 1);
            config.scheme = SchemeSpec::turbo_scheme(L, interleaver_seed, iterations);
            config.scheme.turbo.constituent.feedforward =
                static_cast<unsigned>(reader.integer("scheme.feedforward", 05, 8));
            config.scheme.turbo.constituent.feedback =
                static_cast<unsigned>(reader.integer("scheme.feedback", 07, 8));
            config.scheme.turbo.constituent.memory =
                static_cast<int>(reader.integer("scheme.memory", 2));
            config.plan.grid_start_db = -13.010299956639813; // linear 0.05
            config.plan.grid_stop_db = 0.0;                  // linear 1.0
            config.plan.grid_step_linear = 0.05;
        } else {
            throw ConfigError("config: unknown scheme kind '" + kind + "'");
        }

        config.plan.grid_start_db = reader.number("plan.grid_start_db", config.plan.grid_start_db);
        config.plan.grid_stop_db = reader.number("plan.grid_stop_db", config.plan.grid_stop_db);
        config.plan.grid_step_linear =
            reader.number("plan.grid_step_linear", config.plan.grid_step_linear);
        config.plan.min_frames = reader.integer("plan.min_frames", config.plan.min_frames);
        config.plan.max_frames = reader.integer("plan.max_frames", config.plan.max_frames);
        config.plan.target_errors = reader.integer("plan.target_errors", config.plan.target_errors);
        config.plan.seed = reader.integer("plan.seed", config.plan.seed);

        config.fading.avg_start_db = reader.number("fading.avg_snr_start_db", 0.0);
        config.fading.avg_stop_db = reader.number("fading.avg_snr_stop_db", 30.0);
        config.fading.avg_step_db = reader.number("fading.avg_snr_step_db", 1.0);
        config.fading.frames_per_point = reader.integer("fading.frames_per_point", 10000);
        config.fading.confidence = reader.number("fading.confidence", 0.95);
        if (!(config.fading.confidence > 0.0 && config.fading.confidence < 1.0))
            throw ConfigError("config: fading.confidence must lie in (0,1)");

        config.output.directory = reader.str("output.directory", "out");
        config.output.format = reader.str("output.format", "structured");
        if (config.output.format != "structured" && config.output.format != "csv")
            throw ConfigError("config: output.format must be structured or csv");

        if (const auto lengths = reader.raw("perfplot.frame_lengths")) {
            std::istringstream ss(*lengths);
            std::string token;
            while (std::getline(ss, token, ','))
                config.perfplot_frame_lengths.push_back(std::stoull(detail::trim(token)));
        }
        config.perfplot_curve_csv = reader.str("perfplot.curve_csv", "");

        reader.reject_unknown();
        try {
            config.scheme.validate();
            config.plan.to_plan().validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        return config;
    }

    static ExperimentConfig parse_file(const std::string& path) {
        std::ifstream is(path);
        if (!is)
            throw ConfigError("config: cannot open " + path);
        return parse(is);
    }
};

/// Knobs shared by every subcommand.
struct RunOptions {
    std::string out_dir = "out";
    std::string format = "structured";
    unsigned threads = 0; ///< 0 = all hardware threads
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os)
        throw Error("cannot write " + (dir / name).string());
    return os;
}

} // namespace detail

struct ThresholdOutcome {
    WaterfallThreshold threshold;
    std::uint64_t frames_total = 0;
    std::optional<FerCurve> curve; ///< present for sample-based thresholds
};

/// Uncoded schemes get the closed-form threshold from the analytic detection
/// probability; coded schemes are measured in AWGN and fed to the discrete
/// estimator.
inline ThresholdOutcome compute_threshold(const ExperimentConfig& config, unsigned threads = 0) {
    const SchemeSpec& scheme = config.scheme;
    if (scheme.kind == SchemeKind::uncoded) {
        const std::size_t L = scheme.frame_length;
        auto pd = [L](double gamma) {
            return uncoded_detection_probability(Snr::from_linear(gamma), L);
        };
        WaterfallThreshold threshold = waterfall_from_pd(pd, {}, scheme.describe());
        return {std::move(threshold), 0, std::nullopt};
    }
    const SimulationPlan plan = config.plan.to_plan();
    FerCurve curve = measure_awgn_fer(scheme, plan, threads);
    WaterfallThreshold threshold = waterfall_from_fer_samples(curve);
    threshold.inputs_digest = scheme.describe() + " " + threshold.inputs_digest;
    const std::uint64_t frames = curve.total_frames();
    return {std::move(threshold), frames, std::move(curve)};
}

/// threshold subcommand: report plus the underlying AWGN curve when measured.
inline ThresholdOutcome cmd_threshold(const ExperimentConfig& config, const RunOptions& options) {
    ThresholdOutcome outcome = compute_threshold(config, options.threads);
    const std::filesystem::path dir(options.out_dir);
    if (outcome.curve) {
        auto csv = detail::open_output(dir, "awgn_fer.csv");
        write_fer_curve_csv(csv, *outcome.curve);
    }
    if (options.format == "csv") {
        auto report = detail::open_output(dir, "threshold_report.csv");
        write_threshold_report_csv(report, outcome.threshold, outcome.frames_total);
    } else {
        auto report = detail::open_output(dir, "threshold_report.txt");
        write_threshold_report(report, outcome.threshold, outcome.frames_total);
    }
    return outcome;
}

struct FerCurvesOutcome {
    std::vector<double> avg_snr_db;
    std::vector<double> fer_approx;
    std::vector<double> fer_exact; ///< empty when no error-curve source exists
    WaterfallThreshold threshold;
};

/// fer subcommand: approximate (and, when a pe source exists, exact) FER over
/// the configured average-SNR range.
inline FerCurvesOutcome cmd_fer(const ExperimentConfig& config, const RunOptions& options) {
    ThresholdOutcome base = compute_threshold(config, options.threads);
    FerCurvesOutcome outcome;
    outcome.threshold = base.threshold;

    const std::vector<Snr> grid = config.fading.grid();
    outcome.avg_snr_db.reserve(grid.size());
    outcome.fer_approx.reserve(grid.size());
    for (const Snr& avg : grid) {
        outcome.avg_snr_db.push_back(avg.db());
        outcome.fer_approx.push_back(approx_fer(avg, base.threshold));
    }

    if (config.scheme.kind == SchemeKind::uncoded) {
        const std::size_t L = config.scheme.frame_length;
        auto pe = [L](double gamma) {
            return 1.0 - uncoded_detection_probability(Snr::from_linear(gamma), L);
        };
        for (const Snr& avg : grid)
            outcome.fer_exact.push_back(exact_fer(pe, avg));
    } else if (base.curve) {
        for (const Snr& avg : grid)
            outcome.fer_exact.push_back(exact_fer_from_samples(*base.curve, avg));
    }

    const std::filesystem::path dir(options.out_dir);
    auto csv = detail::open_output(dir, "fer_curve.csv");
    write_fer_comparison_csv(csv, outcome.avg_snr_db, outcome.fer_approx, outcome.fer_exact);
    return outcome;
}

/// simulate subcommand: measured quasi-static FER with Wilson bounds.
inline FerCurve cmd_simulate(const ExperimentConfig& config, const RunOptions& options) {
    const std::vector<Snr> grid = config.fading.grid();
    if (grid.empty())
        throw ConfigError("simulate: empty average-SNR grid");
    FerCurve curve = measure_qsf_fer(config.scheme, grid, config.fading.frames_per_point,
                                     config.plan.seed, options.threads);
    const std::filesystem::path dir(options.out_dir);
    auto csv = detail::open_output(dir, "qsf_fer.csv");
    write_fer_curve_with_ci_csv(csv, curve, config.fading.confidence);
    return curve;
}

/// perfplot subcommand: P_d/gamma^2 curves plus the 1/gamma^2 envelope.
/// Uncoded detection curves are analytic; coded ones come from an AWGN
/// measurement under the configured plan.
inline std::vector<std::string> cmd_perfplot(const ExperimentConfig& config,
                                             const RunOptions& options) {
    const std::filesystem::path dir(options.out_dir);
    std::vector<std::string> written;

    const SimulationPlan plan = config.plan.to_plan();
    std::vector<std::size_t> uncoded_lengths = config.perfplot_frame_lengths;
    if (config.scheme.kind == SchemeKind::uncoded && uncoded_lengths.empty())
        uncoded_lengths.push_back(config.scheme.frame_length);

    DetectionCurve envelope_grid; // any curve defines the shared gamma grid
    auto emit = [&](const std::string& name, const DetectionCurve& curve) {
        const NormalizedCurve normalized = normalized_detection_curve(curve);
        auto csv = detail::open_output(dir, name);
        write_value_curve_csv(csv, "normalized detection probability P_d/gamma^2",
                              normalized.normalized);
        written.push_back(name);
        if (envelope_grid.points.empty())
            envelope_grid = curve;
    };

    for (std::size_t L : uncoded_lengths) {
        DetectionCurve curve;
        curve.source = DetectionCurve::Source::analytic;
        for (double gamma : plan.snr_grid)
            curve.points.emplace_back(gamma,
                                      uncoded_detection_probability(Snr::from_linear(gamma), L));
        emit("normalized_uncoded_" + std::to_string(L) + ".csv", curve);
    }

    if (!config.perfplot_curve_csv.empty()) {
        std::ifstream is(config.perfplot_curve_csv);
        if (!is)
            throw ConfigError("perfplot: cannot open " + config.perfplot_curve_csv);
        const FerCurve stored = read_fer_curve_csv(is);
        DetectionCurve curve;
        curve.source = DetectionCurve::Source::monte_carlo;
        for (const auto& p : stored.points)
            curve.points.emplace_back(p.snr_linear, 1.0 - p.fer);
        emit("normalized_stored.csv", curve);
    } else if (config.scheme.kind != SchemeKind::uncoded) {
        const FerCurve measured = measure_awgn_fer(config.scheme, plan, options.threads);
        DetectionCurve curve;
        curve.source = DetectionCurve::Source::monte_carlo;
        for (const auto& p : measured.points)
            curve.points.emplace_back(p.snr_linear, 1.0 - p.fer);
        emit(std::string("normalized_") + to_string(config.scheme.kind) + "_" +
                 std::to_string(config.scheme.frame_length) + ".csv",
             curve);
    }

    if (!envelope_grid.points.empty()) {
        const NormalizedCurve normalized = normalized_detection_curve(envelope_grid);
        auto csv = detail::open_output(dir, "envelope.csv");
        write_value_curve_csv(csv, "ideal envelope 1/gamma^2", normalized.envelope);
        written.push_back("envelope.csv");
    }
    return written;
}

} // namespace waterfall
