#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <string>

#include "nhxy/errors.hpp"
#include "nhxy/numerics/matrix.hpp"

namespace nhxy::numerics {

/// Mean of a 2 pi-periodic integrand, (2 pi)^-1 * integral over [0, 2 pi),
/// by the equispaced trapezoid rule. Spectrally accurate for analytic
/// periodic integrands. The integrand may return a real or complex value.
template <typename F>
    requires std::invocable<F, double>
[[nodiscard]] Complex quadrature_periodic(F&& f, int n_points) {
    require(n_points >= 16, ErrorKind::argument, "quadrature_periodic: n_points must be >= 16");
    const double h = 2.0 * std::numbers::pi / n_points;
    // Kahan-compensated accumulation on both components
    double re = 0.0, im = 0.0, c_re = 0.0, c_im = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const Complex v = Complex(f(h * k));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            raise(ErrorKind::numeric, "quadrature_periodic: non-finite integrand sample at node " + std::to_string(k));
        const double y_re = v.real() - c_re;
        const double t_re = re + y_re;
        c_re = (t_re - re) - y_re;
        re = t_re;
        const double y_im = v.imag() - c_im;
        const double t_im = im + y_im;
        c_im = (t_im - im) - y_im;
        im = t_im;
    }
    return {re / n_points, im / n_points};
}

} // namespace nhxy::numerics
