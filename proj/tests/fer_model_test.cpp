#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "waterfall/fer_model.hpp"
#include "waterfall/scheme.hpp"

using namespace waterfall;

namespace {

auto uncoded_pe(std::size_t L) {
    return [L](double gamma) {
        return 1.0 - uncoded_detection_probability(Snr::from_linear(gamma), L);
    };
}

WaterfallThreshold fixed_threshold(double gamma_w_linear) {
    return {Snr::from_linear(gamma_w_linear), ThresholdMethod::closed_form, "fixed", {}};
}

FerCurve sample_pe(std::size_t L, double start, double step, double stop) {
    FerCurve curve;
    for (double g = start; g <= stop + 1e-12; g += step) {
        FerPoint p;
        p.snr_linear = g;
        p.frames = 1;
        p.fer = uncoded_pe(L)(g);
        p.errors = p.fer >= 1.0 ? 1 : 0;
        curve.points.push_back(p);
    }
    return curve;
}

} // namespace

TEST_CASE("approx_fer closed form") {
    const WaterfallThreshold t = fixed_threshold(2.0);
    CHECK(approx_fer(Snr::from_linear(2.0), t) == Catch::Approx(1.0 - std::exp(-1.0)));
    CHECK(approx_fer(Snr::from_linear(1e9), t) == Catch::Approx(0.0).margin(1e-8));
    // Frozen oracle value at the uncoded L=256 threshold and 20 dB.
    CHECK(approx_fer(Snr::from_db(20.0), fixed_threshold(3.7862)) ==
          Catch::Approx(0.03715419556).epsilon(1e-9));
}

TEST_CASE("approx_fer monotonicity") {
    const WaterfallThreshold t = fixed_threshold(1.3);
    double prev = 1.0;
    for (double db = 0.0; db <= 30.0; db += 1.0) {
        const double fer = approx_fer(Snr::from_db(db), t);
        CHECK(fer < prev);
        prev = fer;
    }
    CHECK(approx_fer(Snr::from_linear(5.0), fixed_threshold(1.0)) <
          approx_fer(Snr::from_linear(5.0), fixed_threshold(2.0)));
}

TEST_CASE("exact_fer on closed-form error curves") {
    CHECK(exact_fer([](double) { return 1.0; }, Snr::from_linear(3.0)) ==
          Catch::Approx(1.0).epsilon(1e-9));

    // A step error curve integrates to the approximation exactly.
    for (double gamma_th : {0.5, 2.0}) {
        auto pe_step = [gamma_th](double g) { return g < gamma_th ? 1.0 : 0.0; };
        for (double avg : {1.0, 10.0, 100.0}) {
            const double via_integral = exact_fer(pe_step, Snr::from_linear(avg));
            const double via_formula = approx_fer(Snr::from_linear(avg), fixed_threshold(gamma_th));
            CHECK(via_integral == Catch::Approx(via_formula).epsilon(1e-7));
        }
    }
}

TEST_CASE("exact_fer matches the independent oracle for uncoded L=256") {
    // Frozen from a high-precision evaluation of the fading integral.
    CHECK(exact_fer(uncoded_pe(256), Snr::from_db(20.0)) ==
          Catch::Approx(0.03984061966).epsilon(1e-6));
}

TEST_CASE("exact_fer_from_samples edge shapes") {
    // All-ones curve: everything below the last point counts as an error.
    FerCurve ones;
    for (double g = 0.5; g <= 30.0; g += 0.5) {
        FerPoint p;
        p.snr_linear = g;
        p.frames = 1;
        p.errors = 1;
        p.fer = 1.0;
        ones.points.push_back(p);
    }
    CHECK(exact_fer_from_samples(ones, Snr::from_linear(1.0)) ==
          Catch::Approx(1.0).margin(1e-6));

    // Single sample with zero FER: only the leading all-error region remains.
    FerCurve single;
    single.points.push_back({1.5, 1, 0, 0.0});
    CHECK(exact_fer_from_samples(single, Snr::from_linear(2.0)) ==
          Catch::Approx(1.0 - std::exp(-1.5 / 2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(exact_fer_from_samples(FerCurve{}, Snr::from_linear(1.0)), EmptyCurve);
}

TEST_CASE("sampled integration tracks the closed-form fading integral") {
    const FerCurve sampled = sample_pe(256, 0.05, 0.05, 12.0);
    for (double db : {10.0, 15.0, 20.0}) {
        const double closed = exact_fer(uncoded_pe(256), Snr::from_db(db));
        const double from_samples = exact_fer_from_samples(sampled, Snr::from_db(db));
        INFO("avg=" << db << " dB");
        CHECK(std::abs(from_samples - closed) < 1e-3);
    }
}

TEST_CASE("normalized detection curve and envelope") {
    DetectionCurve ideal;
    for (double g = 0.5; g <= 8.0; g += 0.5)
        ideal.points.emplace_back(g, 1.0);
    const NormalizedCurve n = normalized_detection_curve(ideal);
    REQUIRE(n.normalized.size() == n.envelope.size());
    for (std::size_t i = 0; i < n.normalized.size(); ++i) {
        CHECK(n.normalized[i].second == n.envelope[i].second);
        CHECK(n.envelope[i].second ==
              Catch::Approx(1.0 / (n.envelope[i].first * n.envelope[i].first)));
    }

    DetectionCurve bad;
    bad.points.emplace_back(0.0, 0.5);
    CHECK_THROWS_AS(normalized_detection_curve(bad), DegenerateInput);
}

TEST_CASE("normalized curve approaches the envelope from below") {
    DetectionCurve curve;
    for (double g = 0.5; g <= 24.0; g += 0.5)
        curve.points.emplace_back(g, uncoded_detection_probability(Snr::from_linear(g), 512));
    const NormalizedCurve n = normalized_detection_curve(curve);
    for (std::size_t i = 0; i < n.normalized.size(); ++i)
        CHECK(n.normalized[i].second <= n.envelope[i].second);
    // At high SNR the detection probability saturates and the normalized
    // curve merges into 1/gamma^2.
    CHECK(n.normalized.back().second ==
          Catch::Approx(n.envelope.back().second).epsilon(1e-4));
}

TEST_CASE("area under the normalized curve approximates 1/gamma_w") {
    DetectionCurve curve;
    curve.source = DetectionCurve::Source::analytic;
    for (double g = 0.05; g <= 2000.0; g += 0.05)
        curve.points.emplace_back(g, uncoded_detection_probability(Snr::from_linear(g), 256));
    const double area = trapezoid_area(normalized_detection_curve(curve).normalized);
    auto pd = [](double g) { return uncoded_detection_probability(Snr::from_linear(g), 256); };
    const double gw = waterfall_from_pd(pd).gamma_w.linear();
    CHECK(area == Catch::Approx(1.0 / gw).epsilon(0.01));
}

TEST_CASE("snr gap between fading curves") {
    std::vector<FerSample> base, shifted;
    const WaterfallThreshold t = fixed_threshold(1.0);
    for (double db = 0.0; db <= 30.0; db += 0.5) {
        base.push_back({Snr::from_db(db).linear(), approx_fer(Snr::from_db(db), t)});
        shifted.push_back({Snr::from_db(db + 1.0).linear(), approx_fer(Snr::from_db(db), t)});
    }
    CHECK(snr_gap_at_fer(base, base, 1e-1) == Catch::Approx(0.0).margin(1e-12));
    CHECK(snr_gap_at_fer(base, shifted, 1e-1) == Catch::Approx(1.0).margin(1e-9));
    CHECK(snr_gap_at_fer(base, shifted, 1e-2) == Catch::Approx(1.0).margin(1e-9));
    CHECK_THROWS_AS(snr_gap_at_fer(base, shifted, 1e-9), LevelNotBracketed);
}

TEST_CASE("approximation sits within 0.4 dB of the exact fading integral") {
    auto pd = [](double g) { return uncoded_detection_probability(Snr::from_linear(g), 256); };
    const WaterfallThreshold t = waterfall_from_pd(pd);
    std::vector<FerSample> approx, exact;
    for (double db = 10.0; db <= 30.0 + 1e-9; db += 0.5) {
        const Snr avg = Snr::from_db(db);
        approx.push_back({avg.linear(), approx_fer(avg, t)});
        exact.push_back({avg.linear(), exact_fer(uncoded_pe(256), avg)});
    }
    CHECK(snr_gap_at_fer(approx, exact, 1e-1) <= 0.4);
    CHECK(snr_gap_at_fer(approx, exact, 1e-2) <= 0.4);
}

TEST_CASE("exact_fer stays within [0,1] for valid error curves") {
    for (std::size_t L : {16, 256}) {
        for (double db = -5.0; db <= 35.0; db += 5.0) {
            const double fer = exact_fer(uncoded_pe(L), Snr::from_db(db));
            CHECK(fer >= 0.0);
            CHECK(fer <= 1.0 + 1e-12);
        }
    }
}
