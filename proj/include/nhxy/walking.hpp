#pragma once

// Two-dimensional PT-broken flow in the variables X = 2 - pi kappa,
// Y = 2y/sqrt(pi), Y~ = 2 y~/sqrt(pi): hyperboloid invariant, closed-form
// pieces, correlation-length scaling and the d -> 2 fixed-point collision.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nhxy/errors.hpp"
#include "nhxy/numerics/fit.hpp"
#include "nhxy/numerics/matrix.hpp"
#include "nhxy/numerics/ode.hpp"
#include "nhxy/rg_core.hpp"

namespace nhxy::walking {

using numerics::Complex;
using numerics::State;

struct WalkingState {
    double X = 0.0;
    double Y = 0.0;
    double Y_tilde = 0.0;
    double l = 0.0;

    [[nodiscard]] State<3> vec() const noexcept { return {X, Y, Y_tilde}; }
    [[nodiscard]] static WalkingState from_vec(const State<3>& v, double l = 0.0) noexcept {
        return {v[0], v[1], v[2], l};
    }
};

inline const double sqrt_pi = std::sqrt(std::numbers::pi);

[[nodiscard]] inline WalkingState to_walking(const rg::RGState& s, double l = 0.0) {
    s.validate();
    require(s.d == 2.0, ErrorKind::domain, "to_walking: the walking variables are defined at d = 2 only");
    return {2.0 - std::numbers::pi * s.kappa, 2.0 * s.y / sqrt_pi, 2.0 * s.y_tilde / sqrt_pi, l};
}

[[nodiscard]] inline rg::RGState from_walking(const WalkingState& w, rg::PtPhase phase = rg::PtPhase::broken) {
    rg::RGState s{(2.0 - w.X) / std::numbers::pi, 0.5 * sqrt_pi * w.Y, 0.5 * sqrt_pi * w.Y_tilde, phase, 2.0};
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// Flow

/// approximate: (Y~^2 + Y^2, XY, -XY~). Otherwise the untruncated forms
/// (Y~^2 + (1 - X/2)^2 Y^2, XY, 2(1 - 1/(1 - X/2)) Y~).
[[nodiscard]] inline State<3> walking_beta(const State<3>& v, bool approximate) {
    const double X = v[0], Y = v[1], Yt = v[2];
    if (approximate) return {Yt * Yt + Y * Y, X * Y, -X * Yt};
    require(X != 2.0, ErrorKind::domain, "walking_beta: X = 2 (kappa = 0) is singular in the full system");
    const double h = 1.0 - 0.5 * X;
    return {Yt * Yt + h * h * Y * Y, X * Y, 2.0 * (1.0 - 1.0 / h) * Yt};
}

[[nodiscard]] inline State<3> walking_beta(const WalkingState& s, bool approximate) {
    return walking_beta(s.vec(), approximate);
}

/// Frozen-X system dX/dl = Y^2 + Y~^2, dY/dl = X0 Y, dY~/dl = -X0 Y~.
[[nodiscard]] inline State<3> frozen_walking_beta(const State<3>& v, double X0) {
    return {v[1] * v[1] + v[2] * v[2], X0 * v[1], -X0 * v[2]};
}

// ---------------------------------------------------------------------------
// Invariant surfaces

enum class Sheet { two_sheet, one_sheet, cone };

[[nodiscard]] constexpr std::string_view to_string(Sheet s) noexcept {
    switch (s) {
        case Sheet::two_sheet: return "two_sheet";
        case Sheet::one_sheet: return "one_sheet";
        case Sheet::cone: return "cone";
    }
    return "unknown";
}

struct InvariantSurface {
    double c2 = 0.0;
    Sheet sheet = Sheet::cone;
};

inline constexpr double cone_tol = 1e-12;

[[nodiscard]] inline double invariant_c2(const State<3>& v) noexcept {
    return v[0] * v[0] - v[1] * v[1] + v[2] * v[2];
}

/// c^2 = X^2 - Y^2 + Y~^2; c^2 < 0 (X^2 + Y~^2 < Y^2) lies on the two-sheeted
/// hyperboloid, c^2 > 0 on the one-sheeted one.
[[nodiscard]] inline InvariantSurface invariant_value(const WalkingState& s) noexcept {
    InvariantSurface out;
    out.c2 = invariant_c2(s.vec());
    if (std::abs(out.c2) < cone_tol)
        out.sheet = Sheet::cone;
    else
        out.sheet = out.c2 < 0.0 ? Sheet::two_sheet : Sheet::one_sheet;
    return out;
}

struct InvariantCheck {
    double max_drift = 0.0; ///< max |c^2(l) - c^2(0)| over accepted steps
    double l_reached = 0.0;
    numerics::Termination termination = numerics::Termination::span_complete;
};

inline constexpr double invariant_exit_radius = 10.0;

[[nodiscard]] inline numerics::IntegratorConfig invariant_check_config() {
    numerics::IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.max_step = 0.1;
    return cfg;
}

/// Integrates the walking flow from s0 and tracks the drift of c^2. Truncated
/// flows can blow up in finite l, so integration ends once the state leaves
/// the max-norm ball of radius 10; the drift up to that exit is reported.
[[nodiscard]] inline InvariantCheck check_invariant_along_flow(const WalkingState& s0, double l_max,
                                                               bool approximate = true) {
    require(std::isfinite(l_max) && l_max >= 0.0, ErrorKind::argument,
            "check_invariant_along_flow: l_max must be >= 0");
    const auto trace = numerics::integrate_ode<3>(
        [&](double, const State<3>& v) { return walking_beta(v, approximate); }, s0.vec(), {s0.l, s0.l + l_max},
        invariant_check_config(),
        [](double, const State<3>& v) { return invariant_exit_radius - numerics::norm_inf(v); });
    InvariantCheck out;
    const double c0 = invariant_c2(s0.vec());
    for (const auto& v : trace.states) out.max_drift = std::max(out.max_drift, std::abs(invariant_c2(v) - c0));
    out.l_reached = trace.final_l();
    out.termination = trace.termination;
    return out;
}

// ---------------------------------------------------------------------------
// Closed forms

/// Solution of the frozen-X system: Y = Y0 e^{X0 l}, Y~ = Y~0 e^{-X0 l},
/// X = X0 + [Y0^2 (e^{2 X0 l} - 1) + Y~0^2 (1 - e^{-2 X0 l})] / (2 X0).
/// At X0 = 0 the exponentials degenerate to X = (Y0^2 + Y~0^2) l.
[[nodiscard]] inline WalkingState linearized_solutions(double X0, double Y0, double Y_tilde0, double l) {
    WalkingState s;
    s.l = l;
    s.Y = Y0 * std::exp(X0 * l);
    s.Y_tilde = Y_tilde0 * std::exp(-X0 * l);
    if (X0 == 0.0) {
        s.X = (Y0 * Y0 + Y_tilde0 * Y_tilde0) * l;
    } else {
        s.X = X0 + (Y0 * Y0 * std::expm1(2.0 * X0 * l) - Y_tilde0 * Y_tilde0 * std::expm1(-2.0 * X0 * l)) / (2.0 * X0);
    }
    return s;
}

/// X(l) = X0 cos(sqrt(2) c l), the harmonic ansatz for d^2X/dl^2 = -2 c^2 X.
[[nodiscard]] inline double oscillatory_X(double X0, double c, double l) {
    require(std::isfinite(c) && c > 0.0, ErrorKind::domain, "oscillatory_X: c must be > 0");
    return X0 * std::cos(std::numbers::sqrt2 * c * l);
}

struct AnsatzDefect {
    /// max over retained samples of |X'' + 2 c^2 X| / |2 c^2 X|
    double max_relative_defect = 0.0;
    /// largest |X| / c among retained samples
    double max_x_ratio = 0.0;
    std::size_t samples = 0;
};

/// Compares d^2X/dl^2 along the truncated flow with the ansatz relation
/// -2 c^2 X. The flow starts at (X0, 0, sqrt(c^2 - X0^2)) on the c^2 surface
/// and runs for one ansatz period; only samples with |X| <= x_ratio_max * c
/// are kept (the regime where the X^3 term is negligible).
[[nodiscard]] inline AnsatzDefect ansatz_defect(double X0, double c, double x_ratio_max) {
    require(std::isfinite(c) && c > 0.0, ErrorKind::domain, "ansatz_defect: c must be > 0");
    require(std::abs(X0) < c, ErrorKind::domain, "ansatz_defect: need |X0| < c");
    require(x_ratio_max > 0.0, ErrorKind::argument, "ansatz_defect: x_ratio_max must be > 0");
    const State<3> start{X0, 0.0, std::sqrt((c - X0) * (c + X0))};
    const double period = 2.0 * std::numbers::pi / (std::numbers::sqrt2 * c);
    numerics::IntegratorConfig cfg = invariant_check_config();
    cfg.max_step = period / 200.0;
    const auto trace = numerics::integrate_ode<3>(
        [](double, const State<3>& v) { return walking_beta(v, true); }, start, {0.0, period}, cfg);
    AnsatzDefect out;
    const double c2 = c * c;
    for (const auto& v : trace.states) {
        const double X = v[0];
        if (X == 0.0 || std::abs(X) > x_ratio_max * c) continue;
        const State<3> dv = walking_beta(v, true);
        const double x2 = 2.0 * v[1] * dv[1] + 2.0 * v[2] * dv[2];
        out.max_relative_defect = std::max(out.max_relative_defect, std::abs(x2 + 2.0 * c2 * X) / (2.0 * c2 * std::abs(X)));
        out.max_x_ratio = std::max(out.max_x_ratio, std::abs(X) / c);
        ++out.samples;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Correlation length

struct CorrelationLength {
    double l_star = 0.0;
    double xi_inverse = 1.0; ///< in units of the inverse cutoff
};

/// l* = arccos(1/X0) / sqrt(2 b (K - Kc)), xi^-1 = exp(-l*).
[[nodiscard]] inline CorrelationLength correlation_length(double K_minus_Kc, double b, double X0) {
    require(std::isfinite(K_minus_Kc) && K_minus_Kc > 0.0, ErrorKind::domain,
            "correlation_length: K - Kc must be > 0");
    require(std::isfinite(b) && b > 0.0, ErrorKind::domain, "correlation_length: b must be > 0");
    require(std::isfinite(X0) && std::abs(X0) >= 1.0, ErrorKind::domain, "correlation_length: need |X0| >= 1");
    CorrelationLength out;
    out.l_star = std::acos(1.0 / X0) / std::sqrt(2.0 * b * K_minus_Kc);
    out.xi_inverse = std::exp(-out.l_star);
    return out;
}

struct XiSample {
    double K_minus_Kc = 0.0;
    double l_star = 0.0;
    double log_inv_xi = 0.0; ///< -l*
};

struct XiScalingResult {
    std::vector<XiSample> samples; ///< ascending in K - Kc
    double fit_slope = 0.0;        ///< s in ln xi^-1 = -s / sqrt(K - Kc) + const
    double fit_intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> dropped; ///< K - Kc values whose trajectory never reached the threshold
};

inline constexpr std::size_t xi_min_samples = 4;

/// Least-squares fit of ln xi^-1 against -1/sqrt(K - Kc).
inline void fit_xi_scaling(XiScalingResult& r) {
    require(r.samples.size() >= xi_min_samples, ErrorKind::fit,
            "xi scaling fit: " + std::to_string(r.samples.size()) + " samples survive, need at least 4");
    std::vector<double> x, y;
    for (const auto& s : r.samples) {
        x.push_back(-1.0 / std::sqrt(s.K_minus_Kc));
        y.push_back(s.log_inv_xi);
    }
    const auto fit = numerics::fit_line(x, y);
    r.fit_slope = fit.slope;
    r.fit_intercept = fit.intercept;
    r.r_squared = fit.r_squared;
}

[[nodiscard]] inline XiScalingResult fit_xi_scaling(std::vector<XiSample> samples) {
    XiScalingResult r;
    r.samples = std::move(samples);
    fit_xi_scaling(r);
    return r;
}

/// Start rule for the numeric scan: X(0) = -c, Y(0) = Y~(0) = seed_ratio c
/// with c^2 = b (K - Kc), which lies on the c^2 surface exactly.
struct XiScanOptions {
    double b = 1.0;
    double seed_ratio = 0.1;
    double threshold = 1.0;
    double l_max = 1e4;
    numerics::IntegratorConfig integrator = [] {
        numerics::IntegratorConfig cfg;
        cfg.rel_tol = 1e-10;
        cfg.abs_tol = 1e-14;
        return cfg;
    }();

    void validate() const {
        require(b > 0.0 && std::isfinite(b), ErrorKind::domain, "XiScanOptions: b must be > 0");
        require(seed_ratio > 0.0 && std::isfinite(seed_ratio), ErrorKind::domain,
                "XiScanOptions: seed_ratio must be > 0");
        require(threshold > 0.0 && std::isfinite(threshold), ErrorKind::domain, "XiScanOptions: threshold must be > 0");
        require(l_max > 0.0 && std::isfinite(l_max), ErrorKind::domain, "XiScanOptions: l_max must be > 0");
        integrator.validate();
    }
};

[[nodiscard]] inline State<3> xi_start_state(double K_minus_Kc, const XiScanOptions& opt) {
    const double c = std::sqrt(opt.b * K_minus_Kc);
    return {-c, opt.seed_ratio * c, opt.seed_ratio * c};
}

/// First l at which |X| reaches the threshold, or none if the span or the
/// step budget runs out first.
[[nodiscard]] inline std::optional<double> xi_l_star(double K_minus_Kc, const XiScanOptions& opt) {
    require(std::isfinite(K_minus_Kc) && K_minus_Kc > 0.0, ErrorKind::domain, "xi_l_star: K - Kc must be > 0");
    const auto trace = numerics::integrate_ode<3>(
        [](double, const State<3>& v) { return walking_beta(v, true); }, xi_start_state(K_minus_Kc, opt),
        {0.0, opt.l_max}, opt.integrator,
        [&](double, const State<3>& v) { return opt.threshold - std::abs(v[0]); });
    if (trace.termination != numerics::Termination::event) return std::nullopt;
    return trace.final_l();
}

[[nodiscard]] inline XiScalingResult xi_scaling_numeric(std::span<const double> K_minus_Kc_grid,
                                                        const XiScanOptions& opt = {}) {
    opt.validate();
    std::vector<double> grid(K_minus_Kc_grid.begin(), K_minus_Kc_grid.end());
    std::sort(grid.begin(), grid.end());
    require(std::adjacent_find(grid.begin(), grid.end()) == grid.end(), ErrorKind::argument,
            "xi_scaling_numeric: duplicate K - Kc values");
    XiScalingResult r;
    for (double k : grid) {
        require(std::isfinite(k) && k > 0.0, ErrorKind::domain, "xi_scaling_numeric: K - Kc must be > 0");
        std::optional<double> l_star;
        try {
            l_star = xi_l_star(k, opt);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::stiffness && e.kind() != ErrorKind::numeric) throw;
        }
        if (!l_star) {
            r.dropped.push_back(k);
            continue;
        }
        r.samples.push_back({k, *l_star, -*l_star});
    }
    fit_xi_scaling(r);
    return r;
}

/// n values log-spaced over [lo, hi].
[[nodiscard]] inline std::vector<double> log_grid(double lo, double hi, int n) {
    require(lo > 0.0 && hi > lo && n >= 2, ErrorKind::argument, "log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> g(static_cast<std::size_t>(n));
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

// ---------------------------------------------------------------------------
// Toy walking beta function dg/dl = alpha - alpha* - (g - g*)^2

struct ToyWalking {
    Complex g_minus;
    Complex g_plus;
    /// IR/UV scale ratio exp(-pi / sqrt(alpha* - alpha)), only for alpha < alpha*.
    /// The constant pi is the traversal time of the closed-form arctangent
    /// solution from g = +inf to g = -inf.
    std::optional<double> scale_ratio;
};

[[nodiscard]] inline double toy_walking_beta(double g, double alpha, double alpha_star, double g_star) noexcept {
    return alpha - alpha_star - (g - g_star) * (g - g_star);
}

[[nodiscard]] inline ToyWalking toy_walking(double alpha, double alpha_star, double g_star) {
    require(std::isfinite(alpha) && std::isfinite(alpha_star) && std::isfinite(g_star), ErrorKind::domain,
            "toy_walking: non-finite parameter");
    ToyWalking t;
    const double delta = alpha - alpha_star;
    if (delta >= 0.0) {
        const double r = std::sqrt(delta);
        t.g_minus = {g_star - r, 0.0};
        t.g_plus = {g_star + r, 0.0};
    } else {
        const double r = std::sqrt(-delta);
        t.g_minus = {g_star, -r};
        t.g_plus = {g_star, r};
        t.scale_ratio = std::exp(-std::numbers::pi / r);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Fixed-point collision as d -> 2 (PT-broken)

struct CollisionRow {
    double d = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double y1 = 0.0;
    double y_tilde2 = 0.0;
    double lambda0_re = 0.0; ///< y-direction eigenvalue at P2
    [[nodiscard]] double gap() const noexcept { return kappa1 - kappa2; }
};

/// Local power p of q ~ (d-2)^p between consecutive grid points.
struct LocalPower {
    double d_coarse = 0.0;
    double d_fine = 0.0;
    double gap = 0.0;
    double lambda0 = 0.0;
    double y1 = 0.0;
    double y_tilde2 = 0.0;
};

struct CollisionScan {
    std::vector<CollisionRow> rows;  ///< in grid order
    std::vector<LocalPower> powers;  ///< consecutive pairs, d descending
    std::optional<double> kappa1_at_2; ///< linear extrapolation from the two smallest d
    std::optional<double> kappa2_at_2;
};

[[nodiscard]] inline CollisionRow collision_row(double d) {
    const auto fps = rg::fixed_points(d, rg::PtPhase::broken);
    const auto& p1 = fps[0];
    const auto& p2 = fps[1];
    CollisionRow row;
    row.d = d;
    row.kappa1 = p1.location[0];
    row.y1 = p1.location[1];
    row.kappa2 = p2.location[0];
    row.y_tilde2 = p2.location[2];
    // the y direction decouples at P2 (y = 0), so lambda0 is the (y, y) entry
    row.lambda0_re = p2.jacobian(1, 1);
    return row;
}

[[nodiscard]] inline CollisionScan collision_scan(std::span<const double> d_grid) {
    require(!d_grid.empty(), ErrorKind::argument, "collision_scan: empty d grid");
    CollisionScan scan;
    for (double d : d_grid) scan.rows.push_back(collision_row(d));

    std::vector<CollisionRow> sorted = scan.rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.d > b.d; });
    const auto power = [](double qa, double qb, double ea, double eb) { return std::log(qa / qb) / std::log(ea / eb); };
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto& a = sorted[i];
        const auto& b = sorted[i + 1];
        if (a.d == b.d) continue;
        const double ea = a.d - 2.0, eb = b.d - 2.0;
        scan.powers.push_back({a.d, b.d, power(a.gap(), b.gap(), ea, eb), power(a.lambda0_re, b.lambda0_re, ea, eb),
                               power(a.y1, b.y1, ea, eb), power(a.y_tilde2, b.y_tilde2, ea, eb)});
    }
    if (sorted.size() >= 2) {
        const auto& a = sorted[sorted.size() - 2];
        const auto& b = sorted.back();
        if (a.d != b.d) {
            const auto extrapolate = [&](double qa, double qb) {
                return qb - (qa - qb) * (b.d - 2.0) / (a.d - b.d);
            };
            scan.kappa1_at_2 = extrapolate(a.kappa1, b.kappa1);
            scan.kappa2_at_2 = extrapolate(a.kappa2, b.kappa2);
        }
    }
    return scan;
}

} // namespace nhxy::walking
