#include "mlmfit/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlmfit {

namespace {

// Peter Acklam's rational approximation, |rel err| < 1.15e-9 before
// refinement.
double normal_quantile_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > 1 - plow) {
        double q = std::sqrt(-2 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must be in (0,1)");
    double x = normal_quantile_approx(p);
    // one Halley step against erfc
    const double sqrt2 = std::sqrt(2.0);
    double e = 0.5 * std::erfc(-x / sqrt2) - p;
    double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
    x -= u / (1 + x * u / 2);
    return x;
}

namespace {

// Regularized lower series; valid for a > 0, x < a + 1.
double lower_gamma_series(double a, double x) {
    double sum = 1.0 / a, term = sum;
    for (int k = 1; k < 500; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x));  // = gamma_lower(a, x)
}

// Lentz continued fraction for Gamma(a, x); reliable for x >= a + 1.
double upper_gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x)) * h;
}

} // namespace

double upper_incomplete_gamma(double a, double x) {
    if (!(x > 0) || !std::isfinite(x) || !std::isfinite(a))
        throw std::domain_error("upper_incomplete_gamma: requires finite a, x > 0");
    if (x >= a + 1) return upper_gamma_cf(a, x);
    if (a > 0) return std::tgamma(a) - lower_gamma_series(a, x);
    // a <= 0, x small: climb via Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a
    int k = static_cast<int>(std::ceil(1 - a));  // a + k in (0, 1]
    double ak = a + k;
    double g = (x >= ak + 1) ? upper_gamma_cf(ak, x)
                             : std::tgamma(ak) - lower_gamma_series(ak, x);
    for (int i = k; i >= 1; --i) {
        double ai = a + i - 1;  // descend to ai
        g = (g - std::exp(ai * std::log(x) - x)) / ai;
    }
    return g;
}

double log_upper_incomplete_gamma(double a, double x) {
    double g = upper_incomplete_gamma(a, x);
    if (g > 0 && std::isfinite(g)) return std::log(g);
    // Underflow regime (x large): log Gamma(a,x) ~ (a-1) log x - x + log CF tail.
    // Recompute the continued fraction in log space.
    if (x >= a + 1) {
        const double tiny = 1e-300;
        double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
        for (int i = 1; i < 500; ++i) {
            double an = -i * (i - a);
            b += 2;
            d = an * d + b;
            if (std::fabs(d) < tiny) d = tiny;
            c = b + an / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1 / d;
            double delta = d * c;
            h *= delta;
            if (std::fabs(delta - 1) < 1e-16) break;
        }
        return -x + a * std::log(x) + std::log(h);
    }
    throw std::runtime_error("log_upper_incomplete_gamma: non-positive value");
}

} // namespace mlmfit
