#pragma once

// Zero-dimensional toy model with complex energy H(theta) = -J cos(theta) - i K sin(theta).

#include <cmath>
#include <complex>

#include "nhxy/errors.hpp"
#include "nhxy/numerics/quadrature.hpp"
#include "nhxy/numerics/special_functions.hpp"

namespace nhxy::toy {

using numerics::Complex;

struct ToyParams {
    double beta = 1.0; ///< inverse temperature
    double J = 0.0;    ///< cosine coupling
    double K = 0.0;    ///< imaginary sine coupling

    void validate() const {
        require(std::isfinite(beta) && beta > 0.0, ErrorKind::domain, "ToyParams: beta must be > 0");
        require(std::isfinite(J) && J >= 0.0, ErrorKind::domain, "ToyParams: J must be finite and >= 0");
        require(std::isfinite(K) && K >= 0.0, ErrorKind::domain, "ToyParams: K must be finite and >= 0");
    }
};

inline constexpr int default_quadrature_points = 256;

/// Z = I0(beta sqrt(J^2 - K^2)), continued to J0(beta sqrt(K^2 - J^2)) for K > J.
[[nodiscard]] inline double partition_exact(const ToyParams& p) {
    p.validate();
    const double disc = (p.J - p.K) * (p.J + p.K);
    if (disc >= 0.0) return numerics::bessel_I0(p.beta * std::sqrt(disc));
    return numerics::bessel_J0(p.beta * std::sqrt(-disc));
}

/// Direct evaluation of (2 pi)^-1 * integral of exp(beta (J cos + i K sin)).
[[nodiscard]] inline Complex partition_quadrature(const ToyParams& p, int n_points = default_quadrature_points) {
    p.validate();
    require(n_points >= 64, ErrorKind::argument, "partition_quadrature: n_points must be >= 64");
    return numerics::quadrature_periodic(
        [&](double theta) {
            return std::exp(Complex(p.beta * p.J * std::cos(theta), p.beta * p.K * std::sin(theta)));
        },
        n_points);
}

/// H'(theta) = -sqrt(J^2 - K^2) cos(theta). For K > J the principal branch
/// sqrt(J^2 - K^2) = +i sqrt(K^2 - J^2) is used.
[[nodiscard]] inline Complex equivalent_real_hamiltonian(const ToyParams& p, double theta) {
    p.validate();
    const double disc = (p.J - p.K) * (p.J + p.K);
    if (disc >= 0.0) return {-std::sqrt(disc) * std::cos(theta), 0.0};
    return {0.0, -std::sqrt(-disc) * std::cos(theta)};
}

/// The complex toy energy itself.
[[nodiscard]] inline Complex toy_hamiltonian(const ToyParams& p, double theta) {
    return {-p.J * std::cos(theta), -p.K * std::sin(theta)};
}

} // namespace nhxy::toy
