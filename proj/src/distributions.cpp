#include "tarp/distributions.hpp"

#include "tarp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tarp::dist {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return h;
    }
    fail(ErrorKind::internal, "incomplete beta continued fraction did not converge");
}

double log_beta_density(double a, double b, double x) {
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
}

}  // namespace

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_quantile(double p) {
    require(p > 0.0 && p < 1.0, ErrorKind::parameter, "normal quantile needs p in (0,1)");
    // Upper half by symmetry: 1 - p is exact there and the Halley residual avoids cancellation.
    if (p > 0.5) return -normal_quantile(1.0 - p);
    // Acklam's rational approximation, then one Halley step against erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double low = 0.02425;
    double x;
    if (p < low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double incomplete_beta(double a, double b, double x) {
    require(a > 0.0 && b > 0.0, ErrorKind::parameter, "incomplete beta needs a, b > 0");
    require(x >= 0.0 && x <= 1.0, ErrorKind::parameter, "incomplete beta needs x in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double logFront = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(logFront) * beta_continued_fraction(a, b, x) / a;
    return 1.0 - std::exp(logFront) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double inverse_incomplete_beta(double a, double b, double p) {
    require(a > 0.0 && b > 0.0, ErrorKind::parameter, "inverse incomplete beta needs a, b > 0");
    require(p >= 0.0 && p <= 1.0, ErrorKind::parameter, "inverse incomplete beta needs p in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;

    // Starting point: small-x power law I_x ~ x^a / (a B(a,b)) or the mirrored tail, else
    // the mean. The bracket keeps Newton honest whichever start wins.
    double x;
    const double logAB = log_beta(a, b);
    const double xSmall = std::exp((std::log(p) + std::log(a) + logAB) / a);
    const double xLarge = 1.0 - std::exp((std::log1p(-p) + std::log(b) + logAB) / b);
    if (xSmall < 0.5 && incomplete_beta(a, b, xSmall) <= 2.0 * p) x = xSmall;
    else if (xLarge > 0.5 && xLarge < 1.0) x = xLarge;
    else x = a / (a + b);
    x = std::clamp(x, 1e-300, 1.0 - kEps);

    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 300; ++iter) {
        const double f = incomplete_beta(a, b, x) - p;
        if (f == 0.0) return x;
        if (f < 0.0) lo = x;
        else hi = x;
        const double density = std::exp(log_beta_density(a, b, x));
        double next = (density > 0.0 && std::isfinite(density)) ? x - f / density : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4.0 * kEps * std::max(next, kTiny) || hi - lo <= 4.0 * kEps * hi) return next;
        x = next;
    }
    return x;
}

double student_t_pdf(double t, double df) noexcept {
    const double logC = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) - 0.5 * std::log(df * std::numbers::pi);
    return std::exp(logC - 0.5 * (df + 1.0) * std::log1p(t * t / df));
}

double student_t_cdf(double t, double df) {
    require(df > 0.0, ErrorKind::parameter, "Student-t needs df > 0");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double t2 = t * t;
    if (t >= 0.0 && t2 < df) {
        // Near the center: 1/2 + 1/2 * I_{t^2/(df+t^2)}(1/2, df/2)
        return 0.5 + 0.5 * incomplete_beta(0.5, 0.5 * df, t2 / (df + t2));
    }
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t2));
    return t > 0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
    require(df > 0.0 && std::isfinite(df), ErrorKind::parameter, "Student-t needs finite df > 0");
    require(p > 0.0 && p < 1.0, ErrorKind::parameter, "Student-t quantile needs p in (0,1)");
    if (p == 0.5) return 0.0;
    const double tailP = std::min(p, 1.0 - p);  // one-sided tail mass
    const double sign = p < 0.5 ? -1.0 : 1.0;

    double t;
    if (2.0 * tailP > 0.5) {
        // Near the center solve I_y(1/2, df/2) = 1 - 2 tailP with y = t^2/(df + t^2).
        const double y = inverse_incomplete_beta(0.5, 0.5 * df, 1.0 - 2.0 * tailP);
        t = std::sqrt(df * y / (1.0 - y));
    } else {
        const double x = inverse_incomplete_beta(0.5 * df, 0.5, 2.0 * tailP);
        t = std::sqrt(df * (1.0 - x) / x);
    }
    // Polish against the tail probability, written so it never forms 1 - cdf.
    for (int i = 0; i < 3 && std::isfinite(t) && t > 0.0; ++i) {
        const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
        const double density = student_t_pdf(t, df);
        if (density <= 0.0) break;
        const double step = (tail - tailP) / density;
        t += step;
        if (std::abs(step) <= kEps * std::max(1.0, t)) break;
    }
    return sign * t;
}

}  // namespace tarp::dist
