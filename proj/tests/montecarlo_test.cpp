#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "waterfall/montecarlo.hpp"

using namespace waterfall;

namespace {

bool curves_identical(const FerCurve& a, const FerCurve& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& pa = a.points[i];
        const auto& pb = b.points[i];
        if (pa.snr_linear != pb.snr_linear || pa.frames != pb.frames || pa.errors != pb.errors ||
            pa.fer != pb.fer)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("linear grid construction and spacing checks") {
    const auto grid = make_linear_grid(0.05, 0.05, 20);
    REQUIRE(grid.size() == 20);
    CHECK(grid.front() == Catch::Approx(0.05));
    CHECK(grid.back() == Catch::Approx(1.0));
    CHECK(grid_spacing(grid) == Catch::Approx(0.05));

    std::vector<double> uneven{0.1, 0.2, 0.35};
    CHECK_THROWS_AS(grid_spacing(uneven), std::invalid_argument);
    CHECK_THROWS_AS(make_linear_grid(0.0, 0.1, 5), std::invalid_argument);
}

TEST_CASE("plan validation") {
    SimulationPlan plan;
    plan.snr_grid = make_linear_grid(0.5, 0.1, 4);
    plan.validate();

    plan.max_frames = 10;
    plan.min_frames = 20;
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);

    SimulationPlan empty;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("awgn measurement is reproducible and thread-invariant") {
    SimulationPlan plan;
    plan.snr_grid = make_linear_grid(2.0, 0.5, 3);
    plan.min_frames = 300;
    plan.max_frames = 300;
    plan.seed = 17;
    const SchemeSpec scheme = SchemeSpec::uncoded(64);

    const FerCurve serial = measure_awgn_fer(scheme, plan, 1);
    const FerCurve again = measure_awgn_fer(scheme, plan, 1);
    const FerCurve parallel = measure_awgn_fer(scheme, plan, 4);
    CHECK(curves_identical(serial, again));
    CHECK(curves_identical(serial, parallel));
}

TEST_CASE("stopping rules") {
    const SchemeSpec scheme = SchemeSpec::uncoded(64);

    SimulationPlan fixed;
    fixed.snr_grid = make_linear_grid(1.0, 1.0, 2);
    fixed.min_frames = 123;
    fixed.max_frames = 123; // no early stop possible
    fixed.seed = 3;
    const FerCurve curve = measure_awgn_fer(scheme, fixed, 2);
    for (const auto& p : curve.points)
        CHECK(p.frames == 123);

    SimulationPlan early;
    early.snr_grid = make_linear_grid(1.0, 1.0, 1); // FER near 1 at gamma = 1
    early.min_frames = 10;
    early.max_frames = 100000;
    early.target_errors = 5;
    early.seed = 3;
    const FerCurve stopped = measure_awgn_fer(scheme, early, 2);
    CHECK(stopped.points[0].errors >= 5);
    CHECK(stopped.points[0].frames >= 10);
    CHECK(stopped.points[0].frames < 100000);
}

TEST_CASE("counting identity") {
    SimulationPlan plan;
    plan.snr_grid = make_linear_grid(2.0, 1.0, 4);
    plan.min_frames = 200;
    plan.max_frames = 200;
    plan.seed = 5;
    const FerCurve curve = measure_awgn_fer(SchemeSpec::uncoded(100), plan, 2);
    for (const auto& p : curve.points) {
        CHECK(p.fer * static_cast<double>(p.frames) == Catch::Approx(p.errors).margin(1e-9));
        CHECK(p.fer >= 0.0);
        CHECK(p.fer <= 1.0);
    }
}

TEST_CASE("awgn fer tracks the analytic uncoded curve") {
    // Binomial consistency against the analytic detection probability.
    SimulationPlan plan;
    plan.snr_grid = make_linear_grid(3.2, 0.8, 4); // roughly 5 to 7.6 dB
    plan.min_frames = 2000;
    plan.max_frames = 2000;
    plan.seed = 11;
    const std::size_t L = 256;
    const FerCurve curve = measure_awgn_fer(SchemeSpec::uncoded(L), plan, 2);
    const double z999 = 3.2905267314919255;
    for (const auto& p : curve.points) {
        const double expected =
            1.0 - uncoded_detection_probability(Snr::from_linear(p.snr_linear), L);
        const double sigma = std::sqrt(expected * (1.0 - expected) / 2000.0);
        INFO("snr=" << p.snr_linear << " fer=" << p.fer << " expected=" << expected);
        CHECK(std::abs(p.fer - expected) <= z999 * sigma);
    }
}

TEST_CASE("quasi-static measurement basics") {
    const SchemeSpec scheme = SchemeSpec::uncoded(64);
    const std::vector<Snr> grid{Snr::from_linear(0.001), Snr::from_db(20.0)};
    const FerCurve a = measure_qsf_fer(scheme, grid, 500, 29, 2);
    const FerCurve b = measure_qsf_fer(scheme, grid, 500, 29, 1);
    CHECK(curves_identical(a, b));
    // Vanishing average SNR drives FER to 1.
    CHECK(a.points[0].fer == 1.0);
    CHECK(a.points[1].fer < 0.2);
}

TEST_CASE("wilson interval") {
    const ConfidenceInterval zero = binomial_ci(0, 50, 0.95);
    CHECK(zero.low == 0.0);
    CHECK(zero.high > 0.0);
    const ConfidenceInterval full = binomial_ci(50, 50, 0.95);
    CHECK(full.high == 1.0);
    CHECK(full.low < 1.0);

    // Independent evaluation of the Wilson formula at z = 1.95996...
    const ConfidenceInterval half = binomial_ci(50, 100, 0.95);
    CHECK(half.low == Catch::Approx(0.40383153).margin(1e-4));
    CHECK(half.high == Catch::Approx(0.59616847).margin(1e-4));

    CHECK_THROWS_AS(binomial_ci(5, 4, 0.95), std::invalid_argument);
    CHECK_THROWS_AS(binomial_ci(1, 4, 1.5), std::invalid_argument);
}
