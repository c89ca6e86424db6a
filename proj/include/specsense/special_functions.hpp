#pragma once

// Scalar special functions used by the energy-detection closed forms:
// Gaussian tail Q and its inverse, the regularized upper incomplete gamma
// ratio, and the generalized Marcum Q function. All four are pure, clamp
// their probability outputs to [0, 1], and depend only on <cmath>.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace specsense {

// A probability value; functions returning one guarantee 0 <= v <= 1.
using Probability = double;

inline double clamp01(double v) {
    if (v < 0.0) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
}

// Tail of the standard Gaussian: Q(x) = P(Z > x).
inline Probability gaussian_q(double x) {
    if (!std::isfinite(x)) throw std::domain_error("gaussian_q: x must be finite");
    return clamp01(0.5 * std::erfc(x / std::sqrt(2.0)));
}

// Inverse of gaussian_q: returns x with Q(x) = p, for p in (0, 1).
// Rational initial guess (Acklam's minimax fit for the normal quantile)
// refined by two Newton steps on Q itself.
inline double gaussian_q_inv(Probability p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("gaussian_q_inv: p must lie strictly inside (0, 1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    // Quantile of the lower-tail CDF at q, i.e. Phi^-1(q).
    auto phi_inv = [&](double q) {
        constexpr double q_low = 0.02425;
        if (q < q_low) {
            const double u = std::sqrt(-2.0 * std::log(q));
            return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
                   ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
        }
        if (q > 1.0 - q_low) {
            const double u = std::sqrt(-2.0 * std::log(1.0 - q));
            return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
                   ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
        }
        const double u = q - 0.5;
        const double r = u * u;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    };

    // Q(x) = p  <=>  x = -Phi^-1(p).
    double x = -phi_inv(p);
    for (int i = 0; i < 2; ++i) {
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        if (pdf <= 1e-310) break;  // deep tail: the guess is already at full precision
        x += (gaussian_q(x) - p) / pdf;
    }
    return x;
}

// Regularized upper incomplete gamma ratio Q(a, x) = Gamma(a, x) / Gamma(a),
// a > 0, x >= 0. Series expansion below the a+1 crossover, continued fraction
// (modified Lentz) above it.
inline Probability reg_upper_gamma(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::domain_error("reg_upper_gamma: a must be positive and finite");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw std::domain_error("reg_upper_gamma: x must be non-negative and finite");
    if (x == 0.0) return 1.0;

    const double log_prefactor = a * std::log(x) - x - std::lgamma(a);

    if (x < a + 1.0) {
        // Lower series: P(a,x) = prefactor * sum, then Q = 1 - P.
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int i = 0; i < 10000; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        return clamp01(1.0 - sum * std::exp(log_prefactor));
    }

    // Upper continued fraction evaluated by the modified Lentz method.
    constexpr double tiny = 1e-300;
    double b0 = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b0;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b0 += 2.0;
        d = an * d + b0;
        if (std::fabs(d) < tiny) d = tiny;
        c = b0 + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return clamp01(std::exp(log_prefactor) * h);
}

// Generalized Marcum Q function Q_m(a, b): the tail of a noncentral
// chi-square law with 2m degrees of freedom and noncentrality a^2, evaluated
// at b^2. Computed as the Poisson mixture
//   Q_m(a,b) = sum_k e^{-h} h^k / k! * Q(m + k, b^2/2),   h = a^2/2,
// walked outward from the Poisson mode so the dominant weights accumulate
// first; gamma tails are advanced by their two-term recurrence.
inline Probability marcum_q(int m, double a, double b) {
    if (m < 1) throw std::domain_error("marcum_q: order m must be a positive integer");
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw std::domain_error("marcum_q: a and b must be non-negative and finite");
    if (b == 0.0) return 1.0;

    const double h = 0.5 * a * a;
    const double y = 0.5 * b * b;
    if (h == 0.0) return reg_upper_gamma(static_cast<double>(m), y);

    const long k0 = static_cast<long>(h);  // Poisson(h) mode
    const double w0 = std::exp(k0 * std::log(h) - h - std::lgamma(k0 + 1.0));
    const double s0 = static_cast<double>(m) + static_cast<double>(k0);
    const double q0 = reg_upper_gamma(s0, y);
    // inc(s) = y^s e^{-y} / Gamma(s+1) advances Q(s, y): Q(s+1) = Q(s) + inc(s).
    const double inc0 = std::exp(s0 * std::log(y) - y - std::lgamma(s0 + 1.0));

    double acc = w0 * q0;

    // Upward sweep from the mode.
    {
        double w = w0, q = q0, inc = inc0;
        for (long k = k0; k < k0 + 100000; ++k) {
            q += inc;
            inc *= y / (s0 + static_cast<double>(k - k0) + 1.0);
            w *= h / static_cast<double>(k + 1);
            acc += w * q;
            if (w < 1e-18 && k > static_cast<long>(h)) break;
        }
    }
    // Downward sweep below the mode.
    {
        double w = w0, q = q0, inc = inc0;
        for (long k = k0; k > 0; --k) {
            const double s = s0 - static_cast<double>(k0 - k);  // current shape m + k
            w *= static_cast<double>(k) / h;
            inc *= s / y;
            q -= inc;
            if (q < 0.0) q = 0.0;  // cancellation floor: the exact tail is >= 0
            acc += w * q;
            if (w < 1e-18) break;
        }
    }
    return clamp01(acc);
}

}  // namespace specsense
