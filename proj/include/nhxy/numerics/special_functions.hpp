#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "nhxy/errors.hpp"

namespace nhxy::numerics {

namespace detail {

inline void require_finite(double x, const char* who) {
    require(std::isfinite(x), ErrorKind::domain, std::string(who) + ": non-finite argument");
}

} // namespace detail

/// Modified Bessel function I0. Power series up to |x| = 15, then the
/// large-argument expansion e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k).
[[nodiscard]] inline double bessel_I0(double x) {
    detail::require_finite(x, "bessel_I0");
    const double ax = std::abs(x);
    require(ax < 700.0, ErrorKind::range, "bessel_I0: |x| >= 700 overflows");

    if (ax <= 15.0) {
        // All terms positive: no cancellation.
        const double q = 0.25 * ax * ax;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum;
    }

    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 100; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * ax);
        if (next > term) break; // asymptotic series: stop at the smallest term
        term = next;
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return std::exp(ax) / std::sqrt(2.0 * std::numbers::pi * ax) * sum;
}

/// Bessel function J0: alternating series for |x| <= 8, Miller backward
/// recurrence up to 25, Hankel asymptotics beyond.
[[nodiscard]] inline double bessel_J0(double x) {
    detail::require_finite(x, "bessel_J0");
    const double ax = std::abs(x);

    if (ax <= 8.0) {
        const double q = 0.25 * ax * ax;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= -q / (static_cast<double>(k) * k);
            sum += term;
            if (std::abs(term) < 1e-18) break;
        }
        return sum;
    }

    if (ax <= 25.0) {
        // Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised with
        // J0 + 2 (J2 + J4 + ...) = 1.
        int start = static_cast<int>(ax) + 40;
        if (start % 2 != 0) ++start;
        double j_next = 0.0;
        double j_curr = 1e-30;
        double even_sum = 0.0;
        double j0 = 0.0;
        for (int k = start; k >= 1; --k) {
            const double j_prev = (2.0 * k / ax) * j_curr - j_next;
            j_next = j_curr;
            j_curr = j_prev;
            if (std::abs(j_curr) > 1e250) {
                j_curr *= 1e-250;
                j_next *= 1e-250;
                even_sum *= 1e-250;
            }
            // j_curr now holds J_{k-1}
            if ((k - 1) % 2 == 0 && k - 1 > 0) even_sum += j_curr;
        }
        j0 = j_curr;
        return j0 / (j0 + 2.0 * even_sum);
    }

    // b_k = a_k(0) / x^k, P = sum (-1)^k b_{2k}, Q = sum (-1)^k b_{2k+1}
    double p = 1.0;
    double q = 0.0;
    double b = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double next = b * (-(2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * ax);
        if (std::abs(next) > std::abs(b)) break;
        b = next;
        const int half = k / 2;
        const double sign = (half % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            p += sign * b;
        } else {
            q += sign * b;
        }
        if (std::abs(b) < 1e-18) break;
    }
    const double chi = ax - 0.25 * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * ax)) * (p * std::cos(chi) - q * std::sin(chi));
}

/// Gamma function via the Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula for x < 1/2.
[[nodiscard]] inline double gamma_fn(double x) {
    detail::require_finite(x, "gamma_fn");
    require(!(x <= 0.0 && std::floor(x) == x), ErrorKind::domain, "gamma_fn: pole at non-positive integer");
    require(x < 171.6, ErrorKind::range, "gamma_fn: overflow");

    if (x < 0.5) {
        using std::numbers::pi;
        return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    }

    static constexpr double g = 7.0;
    static constexpr std::array<double, 9> coeff = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
    };
    const double z = x - 1.0;
    double a = coeff[0];
    for (std::size_t i = 1; i < coeff.size(); ++i) a += coeff[i] / (z + static_cast<double>(i));
    const double t = z + g + 0.5;
    // split the power to keep t^(z+1/2) finite near the overflow bound
    const double half_pow = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half_pow * (half_pow * std::exp(-t)) * a;
}

} // namespace nhxy::numerics
