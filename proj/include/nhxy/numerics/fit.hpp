#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "nhxy/errors.hpp"

namespace nhxy::numerics {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
[[nodiscard]] inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), ErrorKind::argument, "fit_line: size mismatch");
    require(x.size() >= 2, ErrorKind::fit, "fit_line: need at least two samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0, ErrorKind::fit, "fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

struct OriginFit {
    double slope = 0.0;
    /// ||y - slope * x||_2 / ||y||_2
    double relative_residual = 0.0;
};

/// Least squares y = slope * x through the origin.
[[nodiscard]] inline OriginFit fit_through_origin(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), ErrorKind::argument, "fit_through_origin: size mismatch");
    require(!x.empty(), ErrorKind::fit, "fit_through_origin: no samples");
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    require(sxx > 0.0, ErrorKind::fit, "fit_through_origin: all abscissae are zero");
    OriginFit fit;
    fit.slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.slope * x[i];
        ss_res += r * r;
    }
    fit.relative_residual = syy > 0.0 ? std::sqrt(ss_res / syy) : 0.0;
    return fit;
}

} // namespace nhxy::numerics
