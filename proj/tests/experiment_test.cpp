#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "waterfall/experiment.hpp"

using namespace waterfall;

namespace {

ExperimentConfig parse_string(const std::string& text) {
    std::istringstream is(text);
    return ExperimentConfig::parse(is);
}

const char* kTurboConfig = R"(
# desk-scale turbo experiment
[scheme]
kind = turbo
frame_length = 256
iterations = 8
interleaver_seed = 1

[plan]
min_frames = 50
max_frames = 50
seed = 7

[output]
directory = out
format = structured
)";

} // namespace

TEST_CASE("config parsing fills scheme and plan") {
    const ExperimentConfig config = parse_string(kTurboConfig);
    CHECK(config.scheme.kind == SchemeKind::turbo);
    CHECK(config.scheme.frame_length == 256);
    CHECK(config.scheme.turbo.iterations == 8);
    CHECK(config.plan.min_frames == 50);
    CHECK(config.plan.seed == 7);

    // Default turbo grid: gamma in (0, 1] with step 0.05.
    const SimulationPlan plan = config.plan.to_plan();
    REQUIRE(plan.snr_grid.size() == 20);
    CHECK(plan.snr_grid.front() == Catch::Approx(0.05).epsilon(1e-9));
    CHECK(plan.snr_grid.back() == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("config parsing reads octal generators") {
    const ExperimentConfig config = parse_string(R"(
[scheme]
kind = convolutional
frame_length = 128
feedforward = 17
feedback = 15
memory = 3
)");
    CHECK(config.scheme.conv.feedforward == 017);
    CHECK(config.scheme.conv.feedback == 015);
    CHECK(config.scheme.conv.memory == 3);
    // Default convolutional grid: gamma in (0, 3] with step 0.1.
    const SimulationPlan plan = config.plan.to_plan();
    REQUIRE(plan.snr_grid.size() == 30);
    CHECK(plan.snr_grid.back() == Catch::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(parse_string("[scheme]\nkind = smoke\nframe_length = 8\n"), ConfigError);
    CHECK_THROWS_AS(parse_string("[scheme]\nkind = uncoded\n"), ConfigError);
    CHECK_THROWS_AS(parse_string("[scheme]\nkind = uncoded\nframe_length = twelve\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_string("[scheme]\nkind = uncoded\nframe_length = 8\ntypo_key = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_string("kind @ uncoded\n"), ConfigError);
    CHECK_THROWS_AS(parse_string("[scheme]\nkind = uncoded\nframe_length = 8\n"
                                 "[output]\nformat = yaml\n"),
                    ConfigError);
}

TEST_CASE("fer curve csv round trip") {
    FerCurve curve;
    curve.points.push_back({0.5, 2000, 2000, 1.0});
    curve.points.push_back({0.625, 2000, 1234, 0.617});
    std::stringstream ss;
    write_fer_curve_csv(ss, curve);
    const FerCurve parsed = read_fer_curve_csv(ss);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed.points[0].snr_linear == curve.points[0].snr_linear);
    CHECK(parsed.points[1].errors == 1234);
    CHECK(parsed.points[1].fer == curve.points[1].fer);

    std::stringstream bad("not,a,header\n");
    CHECK_THROWS_AS(read_fer_curve_csv(bad), ConfigError);
}

TEST_CASE("threshold report format") {
    WaterfallThreshold t{Snr::from_db(5.782), ThresholdMethod::closed_form, "uncoded L=256", {}};
    std::stringstream ss;
    write_threshold_report(ss, t, 0);
    const std::string report = ss.str();
    CHECK(report.find("method closed_form") != std::string::npos);
    CHECK(report.find("gamma_w_db 5.782") != std::string::npos);
    CHECK(report.find("gamma_w_linear 3.786") != std::string::npos);
    CHECK(report.find("k_index -1") != std::string::npos);
    CHECK(report.find("frames_total 0") != std::string::npos);

    WaterfallThreshold s{Snr::from_linear(0.36), ThresholdMethod::sample_based, "turbo", 7};
    std::stringstream cs;
    write_threshold_report_csv(cs, s, 40000);
    CHECK(cs.str().find("sample_based,") != std::string::npos);
    CHECK(cs.str().find(",7,40000") != std::string::npos);
}

TEST_CASE("threshold command writes report and curve") {
    ExperimentConfig config = parse_string(R"(
[scheme]
kind = uncoded
frame_length = 256
)");
    const auto dir = std::filesystem::temp_directory_path() / "waterfall_test_threshold";
    std::filesystem::remove_all(dir);
    RunOptions options{dir.string(), "structured", 2};
    const ThresholdOutcome outcome = cmd_threshold(config, options);
    CHECK(outcome.threshold.gamma_w.db() == Catch::Approx(5.78).margin(0.01));
    CHECK(std::filesystem::exists(dir / "threshold_report.txt"));
    CHECK(!std::filesystem::exists(dir / "awgn_fer.csv")); // analytic path has no curve

    std::ifstream report(dir / "threshold_report.txt");
    std::string first_line;
    std::getline(report, first_line);
    CHECK(first_line == "method closed_form");
    std::filesystem::remove_all(dir);
}

TEST_CASE("fer command emits approx and exact columns for uncoded schemes") {
    ExperimentConfig config = parse_string(R"(
[scheme]
kind = uncoded
frame_length = 256

[fading]
avg_snr_start_db = 10
avg_snr_stop_db = 30
avg_snr_step_db = 5
)");
    const auto dir = std::filesystem::temp_directory_path() / "waterfall_test_fer";
    std::filesystem::remove_all(dir);
    const FerCurvesOutcome outcome = cmd_fer(config, {dir.string(), "structured", 2});
    REQUIRE(outcome.avg_snr_db.size() == 5);
    REQUIRE(outcome.fer_exact.size() == 5);
    // Row at exactly the threshold would give 1 - 1/e; check the 20 dB row
    // against the frozen oracle instead.
    CHECK(outcome.fer_approx[2] == Catch::Approx(0.0371554).epsilon(1e-3));
    CHECK(outcome.fer_exact[2] == Catch::Approx(0.03984).epsilon(1e-3));

    std::ifstream csv(dir / "fer_curve.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "avg_snr_db,fer_approx,fer_exact");
    std::filesystem::remove_all(dir);
}

TEST_CASE("simulate command writes wilson bounds and is seed-stable") {
    ExperimentConfig config = parse_string(R"(
[scheme]
kind = uncoded
frame_length = 64

[fading]
avg_snr_start_db = 15
avg_snr_stop_db = 20
avg_snr_step_db = 5
frames_per_point = 400
)");
    const auto dir = std::filesystem::temp_directory_path() / "waterfall_test_sim";
    std::filesystem::remove_all(dir);
    const FerCurve a = cmd_simulate(config, {dir.string(), "structured", 2});
    const FerCurve b = cmd_simulate(config, {dir.string(), "structured", 1});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a.points[i].errors == b.points[i].errors);

    std::ifstream csv(dir / "qsf_fer.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "snr_linear,snr_db,frames,errors,fer,wilson_low,wilson_high");
    std::filesystem::remove_all(dir);
}

TEST_CASE("simulate command rejects an empty average-SNR range") {
    ExperimentConfig config = parse_string(R"(
[scheme]
kind = uncoded
frame_length = 64

[fading]
avg_snr_start_db = 20
avg_snr_stop_db = 10
)");
    CHECK_THROWS_AS(cmd_simulate(config, {"/tmp/waterfall_never", "structured", 1}), ConfigError);
}

TEST_CASE("normalized-curve areas order the schemes") {
    // Small-budget measurement is enough to order the areas: a larger area
    // means a smaller threshold and a better fading FER.
    auto area_of = [](const SchemeSpec& scheme, double start, double step, std::size_t count) {
        SimulationPlan plan;
        plan.snr_grid = make_linear_grid(start, step, count);
        plan.min_frames = 300;
        plan.max_frames = 300;
        plan.seed = 21;
        const FerCurve measured = measure_awgn_fer(scheme, plan, 2);
        DetectionCurve curve;
        curve.source = DetectionCurve::Source::monte_carlo;
        for (const auto& p : measured.points)
            curve.points.emplace_back(p.snr_linear, 1.0 - p.fer);
        return trapezoid_area(normalized_detection_curve(curve).normalized);
    };
    const double turbo_256 = area_of(SchemeSpec::turbo_scheme(256, 1), 0.05, 0.05, 20);
    const double conv_256 = area_of(SchemeSpec::convolutional(256), 0.1, 0.1, 30);
    const double conv_1024 = area_of(SchemeSpec::convolutional(1024), 0.1, 0.1, 30);
    INFO("areas: turbo256=" << turbo_256 << " conv256=" << conv_256
                            << " conv1024=" << conv_1024);
    CHECK(turbo_256 > conv_256);
    CHECK(conv_1024 < conv_256);
}

TEST_CASE("perfplot command emits normalized curves and envelope") {
    ExperimentConfig config = parse_string(R"(
[scheme]
kind = uncoded
frame_length = 256

[perfplot]
frame_lengths = 256,1024
)");
    const auto dir = std::filesystem::temp_directory_path() / "waterfall_test_perf";
    std::filesystem::remove_all(dir);
    const auto files = cmd_perfplot(config, {dir.string(), "structured", 2});
    REQUIRE(files.size() == 3);
    CHECK(std::filesystem::exists(dir / "normalized_uncoded_256.csv"));
    CHECK(std::filesystem::exists(dir / "normalized_uncoded_1024.csv"));
    CHECK(std::filesystem::exists(dir / "envelope.csv"));

    std::ifstream csv(dir / "envelope.csv");
    std::string comment, header;
    std::getline(csv, comment);
    std::getline(csv, header);
    CHECK(comment.rfind("# ", 0) == 0);
    CHECK(header == "gamma_linear,gamma_db,value");
    std::filesystem::remove_all(dir);
}

TEST_CASE("perfplot command can plot a stored curve") {
    const auto dir = std::filesystem::temp_directory_path() / "waterfall_test_perf_stored";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    FerCurve stored;
    stored.points.push_back({0.5, 100, 100, 1.0});
    stored.points.push_back({1.0, 100, 40, 0.4});
    stored.points.push_back({1.5, 100, 5, 0.05});
    {
        std::ofstream os(dir / "measured.csv");
        write_fer_curve_csv(os, stored);
    }

    ExperimentConfig config = parse_string(
        "[scheme]\nkind = convolutional\nframe_length = 64\n"
        "[perfplot]\ncurve_csv = " +
        (dir / "measured.csv").string() + "\n");
    const auto files = cmd_perfplot(config, {dir.string(), "structured", 1});
    REQUIRE(files.size() == 2);
    CHECK(std::filesystem::exists(dir / "normalized_stored.csv"));

    std::ifstream csv(dir / "normalized_stored.csv");
    std::string comment, header, row;
    std::getline(csv, comment);
    std::getline(csv, header);
    std::getline(csv, row);
    // First point: P_d = 0 at gamma = 0.5.
    CHECK(row == "0.5,-3.0102999566398121,0");
    std::filesystem::remove_all(dir);
}
