#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "waterfall/errors.hpp"

namespace waterfall {

/// Tail integral of the standard Gaussian density.
inline double q_function(double x) {
    return 0.5 * std::erfc(x * 0.70710678118654752440084436210485);
}

/// Inverse standard normal CDF (Acklam's rational approximation refined by
/// one Halley step). Used for Wilson confidence intervals.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0,1)");

    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;

    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double e = q_function(-x) - p; // CDF(x) - p
    const double u = e * std::sqrt(2.0 * 3.141592653589793238462643) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

struct QuadratureConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 4000;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions < 1)
            throw std::invalid_argument("QuadratureConfig: rel_tol > 0, abs_tol >= 0, "
                                        "max_subdivisions >= 1 required");
    }
};

namespace detail {

// Gauss-Kronrod 7-15 pair. Nodes are strictly interior, so integrands may be
// singular at the interval endpoints as long as the integral exists.
struct Gk15Result {
    double integral;
    double error;
};

template <class F>
Gk15Result gk15(F&& f, double a, double b) {
    static constexpr double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    static constexpr double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double center = 0.5 * (a + b);
    const double halflen = 0.5 * (b - a);

    double fv[15];
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(center - halflen * xgk[j]);
        fv[14 - j] = f(center + halflen * xgk[j]);
    }
    fv[7] = f(center);

    double resk = wgk[7] * fv[7];
    double resg = wg[3] * fv[7];
    double resabs = wgk[7] * std::abs(fv[7]);
    for (int j = 0; j < 7; ++j) {
        const double sum = fv[j] + fv[14 - j];
        resk += wgk[j] * sum;
        resabs += wgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1)
            resg += wg[j / 2] * sum;
    }

    const double mean = resk * 0.5;
    double resasc = wgk[7] * std::abs(fv[7] - mean);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

    const double integral = resk * halflen;
    resabs *= halflen;
    resasc *= halflen;

    double err = std::abs((resk - resg) * halflen);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(err, 50.0 * eps * resabs);
    return {integral, err};
}

struct Segment {
    double a, b, integral, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

} // namespace detail

/// Adaptive estimate of the integral of f over the union of segments given
/// by sorted breakpoints. Globally adaptive: the segment with the largest
/// error estimate is bisected until the summed error meets
/// max(abs_tol, rel_tol*|result|). Seeding several initial segments keeps
/// features far narrower than the whole domain from being missed by the
/// first rule application.
template <class F>
double integrate_segmented(F&& f, std::span<const double> breakpoints,
                           const QuadratureConfig& cfg = {}) {
    cfg.validate();
    if (breakpoints.size() < 2)
        throw std::invalid_argument("integrate_segmented: need at least two breakpoints");

    std::priority_queue<detail::Segment> segments;
    double total_integral = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        if (!(a <= b))
            throw std::invalid_argument("integrate_segmented: breakpoints must be sorted");
        if (a == b)
            continue;
        auto r = detail::gk15(f, a, b);
        segments.push({a, b, r.integral, r.error});
        total_integral += r.integral;
        total_error += r.error;
    }
    if (segments.empty())
        return 0.0;

    for (int splits = 0;; ++splits) {
        if (total_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total_integral)))
            return total_integral;
        if (splits >= cfg.max_subdivisions)
            throw NonConvergence("adaptive quadrature: subdivision budget exhausted");

        const detail::Segment worst = segments.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw NonConvergence("adaptive quadrature: interval at machine resolution "
                                 "before tolerance met");
        segments.pop();
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        segments.push({worst.a, mid, left.integral, left.error});
        segments.push({mid, worst.b, right.integral, right.error});
        total_integral += left.integral + right.integral - worst.integral;
        total_error += left.error + right.error - worst.error;
    }
}

/// Adaptive estimate of the integral of f over [a, b].
template <class F>
double integrate_finite(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
    if (!(a <= b))
        throw std::invalid_argument("integrate_finite: requires a <= b");
    const double points[2] = {a, b};
    return integrate_segmented(f, points, cfg);
}

/// Integral of f over [a, inf) for a > 0 and f = O(1/gamma^2) at infinity.
/// The substitution t = 1/gamma maps the domain to (0, 1/a] where the decaying
/// tail becomes a bounded integrand; no truncation is involved.
template <class F>
double integrate_semi_infinite(F&& f, double a, const QuadratureConfig& cfg = {}) {
    if (!(a > 0.0))
        throw std::invalid_argument("integrate_semi_infinite: requires a > 0");
    return integrate_finite(
        [&f](double t) {
            const double gamma = 1.0 / t;
            return f(gamma) * gamma * gamma;
        },
        0.0, 1.0 / a, cfg);
}

} // namespace waterfall
