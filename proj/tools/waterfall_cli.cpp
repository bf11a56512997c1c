// Command-line front end: measure AWGN FER curves, compute waterfall
// thresholds, approximate and validate quasi-static fading FER, and emit
// plot data.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "waterfall/experiment.hpp"
#include "waterfall/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAcceptance = 3;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::string format = "structured";
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* config = cmd->add_option("--config", args.config_path, "experiment config file");
    if (config_required)
        config->required();
    cmd->add_option("--seed", args.seed, "override the master seed");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--format", args.format, "threshold report format")
        ->check(CLI::IsMember({"csv", "structured"}));
    cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)");
}

waterfall::ExperimentConfig load_config(const CommonArgs& args) {
    waterfall::ExperimentConfig config = waterfall::ExperimentConfig::parse_file(args.config_path);
    if (args.seed)
        config.plan.seed = *args.seed;
    if (args.out_dir)
        config.output.directory = *args.out_dir;
    if (!args.format.empty())
        config.output.format = args.format;
    return config;
}

waterfall::RunOptions run_options(const waterfall::ExperimentConfig& config,
                                  const CommonArgs& args) {
    return {config.output.directory, config.output.format, args.threads};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"waterfall threshold and quasi-static fading FER toolkit"};
    app.require_subcommand(1);

    CommonArgs threshold_args, fer_args, simulate_args, perfplot_args;
    unsigned validate_threads = 0;
    std::uint64_t validate_seed = 1;

    auto* threshold_cmd =
        app.add_subcommand("threshold", "compute the waterfall threshold of a scheme");
    add_common(threshold_cmd, threshold_args);

    auto* fer_cmd =
        app.add_subcommand("fer", "approximate (and exact) FER over an average-SNR range");
    add_common(fer_cmd, fer_args);

    auto* simulate_cmd =
        app.add_subcommand("simulate", "Monte-Carlo FER on the quasi-static fading channel");
    add_common(simulate_cmd, simulate_args);

    auto* perfplot_cmd =
        app.add_subcommand("perfplot", "normalized detection-probability plot data");
    add_common(perfplot_cmd, perfplot_args);

    auto* validate_cmd = app.add_subcommand("validate", "run the acceptance checks end to end");
    validate_cmd->add_option("--threads", validate_threads, "worker threads (0 = all cores)");
    validate_cmd->add_option("--seed", validate_seed, "master seed for the Monte-Carlo stages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (threshold_cmd->parsed()) {
            const auto config = load_config(threshold_args);
            const auto outcome = waterfall::cmd_threshold(config, run_options(config, threshold_args));
            std::cout << "scheme " << config.scheme.describe() << "\n";
            waterfall::write_threshold_report(std::cout, outcome.threshold, outcome.frames_total);
        } else if (fer_cmd->parsed()) {
            const auto config = load_config(fer_args);
            const auto outcome = waterfall::cmd_fer(config, run_options(config, fer_args));
            std::cout << "scheme " << config.scheme.describe() << "\n"
                      << "gamma_w_db " << waterfall::detail::fmt_sig4(outcome.threshold.gamma_w.db())
                      << "\npoints " << outcome.avg_snr_db.size() << "\nwrote fer_curve.csv\n";
        } else if (simulate_cmd->parsed()) {
            const auto config = load_config(simulate_args);
            const auto curve = waterfall::cmd_simulate(config, run_options(config, simulate_args));
            std::cout << "scheme " << config.scheme.describe() << "\npoints " << curve.size()
                      << "\nframes " << curve.total_frames() << "\nwrote qsf_fer.csv\n";
        } else if (perfplot_cmd->parsed()) {
            const auto config = load_config(perfplot_args);
            const auto files = waterfall::cmd_perfplot(config, run_options(config, perfplot_args));
            for (const auto& f : files)
                std::cout << "wrote " << f << "\n";
        } else if (validate_cmd->parsed()) {
            waterfall::AcceptanceOptions options;
            options.threads = validate_threads;
            options.seed = validate_seed;
            const auto results = waterfall::run_acceptance_criteria(options, &std::cout);
            if (!waterfall::all_passed(results)) {
                std::cout << "acceptance: FAILED\n";
                return kExitAcceptance;
            }
            std::cout << "acceptance: all criteria passed\n";
        }
    } catch (const waterfall::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const waterfall::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
