#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "waterfall/errors.hpp"
#include "waterfall/fer_model.hpp"
#include "waterfall/montecarlo.hpp"
#include "waterfall/snr.hpp"
#include "waterfall/threshold.hpp"

namespace waterfall {

namespace detail {

/// Shortest decimal that round-trips a double.
inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_sig4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%#.4g", v); // keep trailing zeros: 4 significant figures
    return buf;
}

} // namespace detail

inline void write_fer_curve_csv(std::ostream& os, const FerCurve& curve) {
    os << "snr_linear,snr_db,frames,errors,fer\n";
    for (const auto& p : curve.points) {
        os << detail::fmt_full(p.snr_linear) << ','
           << detail::fmt_full(Snr::from_linear(p.snr_linear).db()) << ',' << p.frames << ','
           << p.errors << ',' << detail::fmt_full(p.fer) << '\n';
    }
}

/// FerCurve CSV plus Wilson bounds, for measured quasi-static curves.
inline void write_fer_curve_with_ci_csv(std::ostream& os, const FerCurve& curve,
                                        double confidence) {
    os << "snr_linear,snr_db,frames,errors,fer,wilson_low,wilson_high\n";
    for (const auto& p : curve.points) {
        const ConfidenceInterval ci = binomial_ci(p.errors, p.frames, confidence);
        os << detail::fmt_full(p.snr_linear) << ','
           << detail::fmt_full(Snr::from_linear(p.snr_linear).db()) << ',' << p.frames << ','
           << p.errors << ',' << detail::fmt_full(p.fer) << ',' << detail::fmt_full(ci.low) << ','
           << detail::fmt_full(ci.high) << '\n';
    }
}

inline FerCurve read_fer_curve_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw ConfigError("FER curve CSV: missing header");
    if (line.rfind("snr_linear,snr_db,frames,errors,fer", 0) != 0)
        throw ConfigError("FER curve CSV: unexpected header '" + line + "'");
    FerCurve curve;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        FerPoint p;
        double snr_db = 0.0;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        if (!(row >> p.snr_linear >> snr_db >> p.frames >> p.errors >> p.fer))
            throw ConfigError("FER curve CSV: malformed row '" + line + "'");
        curve.points.push_back(p);
    }
    if (curve.points.empty())
        throw ConfigError("FER curve CSV: no data rows");
    return curve;
}

/// Generic value-vs-SNR curve with a comment line naming the quantity.
inline void write_value_curve_csv(std::ostream& os, const std::string& quantity,
                                  std::span<const std::pair<double, double>> points) {
    os << "# " << quantity << "\n";
    os << "gamma_linear,gamma_db,value\n";
    for (const auto& [gamma, value] : points)
        os << detail::fmt_full(gamma) << ',' << detail::fmt_full(Snr::from_linear(gamma).db())
           << ',' << detail::fmt_full(value) << '\n';
}

/// Structured threshold report; thresholds are printed to 4 significant
/// figures. k_index is -1 for analytic thresholds.
inline void write_threshold_report(std::ostream& os, const WaterfallThreshold& threshold,
                                   std::uint64_t frames_total) {
    os << "method " << to_string(threshold.method) << '\n';
    os << "gamma_w_db " << detail::fmt_sig4(threshold.gamma_w.db()) << '\n';
    os << "gamma_w_linear " << detail::fmt_sig4(threshold.gamma_w.linear()) << '\n';
    os << "k_index " << (threshold.k_index ? static_cast<long long>(*threshold.k_index) : -1)
       << '\n';
    os << "frames_total " << frames_total << '\n';
    if (!threshold.inputs_digest.empty())
        os << "inputs " << threshold.inputs_digest << '\n';
}

/// The same report as a single CSV row.
inline void write_threshold_report_csv(std::ostream& os, const WaterfallThreshold& threshold,
                                       std::uint64_t frames_total) {
    os << "method,gamma_w_db,gamma_w_linear,k_index,frames_total\n";
    os << to_string(threshold.method) << ',' << detail::fmt_sig4(threshold.gamma_w.db()) << ','
       << detail::fmt_sig4(threshold.gamma_w.linear()) << ','
       << (threshold.k_index ? static_cast<long long>(*threshold.k_index) : -1) << ','
       << frames_total << '\n';
}

/// avg_snr_db,fer_approx[,fer_exact] comparison table.
inline void write_fer_comparison_csv(std::ostream& os, std::span<const double> avg_snr_db,
                                     std::span<const double> fer_approx,
                                     std::span<const double> fer_exact) {
    const bool have_exact = !fer_exact.empty();
    os << (have_exact ? "avg_snr_db,fer_approx,fer_exact\n" : "avg_snr_db,fer_approx\n");
    for (std::size_t i = 0; i < avg_snr_db.size(); ++i) {
        os << detail::fmt_full(avg_snr_db[i]) << ',' << detail::fmt_full(fer_approx[i]);
        if (have_exact)
            os << ',' << detail::fmt_full(fer_exact[i]);
        os << '\n';
    }
}

} // namespace waterfall
