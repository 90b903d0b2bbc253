#pragma once

// d-dimensional RG flow of the non-Hermitian clock model in the couplings
// (kappa, y, y_tilde): beta functions in both PT regimes, fixed points,
// linearisation and critical exponents.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nhxy/errors.hpp"
#include "nhxy/numerics/eigen.hpp"
#include "nhxy/numerics/fit.hpp"
#include "nhxy/numerics/matrix.hpp"
#include "nhxy/numerics/newton.hpp"
#include "nhxy/numerics/ode.hpp"
#include "nhxy/numerics/special_functions.hpp"

namespace nhxy::rg {

using numerics::Complex;
using numerics::Matrix;
using numerics::State;

inline constexpr double pi = std::numbers::pi;
inline constexpr double four_over_pi2 = 4.0 / (pi * pi);
/// kappa at the BKT point of the two-dimensional flow.
inline constexpr double kappa_bkt = 2.0 / pi;

enum class PtPhase { symmetric, broken };

[[nodiscard]] constexpr std::string_view to_string(PtPhase p) noexcept {
    return p == PtPhase::symmetric ? "symmetric" : "broken";
}

[[nodiscard]] constexpr double phase_sign(PtPhase p) noexcept { return p == PtPhase::symmetric ? 1.0 : -1.0; }

// ---------------------------------------------------------------------------
// Field theory -> effective clock model

struct FieldTheoryParams {
    double m2 = -1.0; ///< mass squared, negative in the ordered phase
    double u = 1.0;   ///< quartic coupling
    double v = 0.0;   ///< real part of the clock perturbation
    double w = 0.0;   ///< imaginary part of the clock perturbation
    int N = 4;

    void validate() const {
        require(std::isfinite(m2) && std::isfinite(u) && std::isfinite(v) && std::isfinite(w), ErrorKind::domain,
                "FieldTheoryParams: non-finite parameter");
        require(u > 0.0, ErrorKind::domain, "FieldTheoryParams: u must be > 0");
        require(v >= 0.0 && w >= 0.0, ErrorKind::domain, "FieldTheoryParams: v, w must be >= 0");
        require(N >= 1, ErrorKind::domain, "FieldTheoryParams: N must be >= 1");
    }
};

struct EffectiveCouplings {
    double K_stiffness = 0.0;
    double z_r = 0.0;
    double z_i = 0.0;
    Complex z_tilde; ///< sqrt(z_r^2 - z_i^2), purely imaginary when z_i > z_r
    PtPhase pt_phase = PtPhase::symmetric;
};

/// Amplitude-frozen effective couplings: rho0^2 = -2 m2 / u, K = rho0^2,
/// (z_r, z_i) = (v, w) rho0^N / 2^(N/2).
[[nodiscard]] inline EffectiveCouplings map_to_effective(const FieldTheoryParams& p) {
    p.validate();
    require(p.m2 < 0.0, ErrorKind::domain,
            "map_to_effective: m2 >= 0 is the disordered phase, amplitude freezing does not apply");
    const double rho0_sq = -2.0 * p.m2 / p.u;
    const double scale = std::pow(rho0_sq / 2.0, 0.5 * p.N);
    EffectiveCouplings c;
    c.K_stiffness = rho0_sq;
    c.z_r = p.v * scale;
    c.z_i = p.w * scale;
    const double disc = (c.z_r - c.z_i) * (c.z_r + c.z_i);
    c.z_tilde = disc >= 0.0 ? Complex(std::sqrt(disc), 0.0) : Complex(0.0, std::sqrt(-disc));
    c.pt_phase = c.z_i > c.z_r ? PtPhase::broken : PtPhase::symmetric;
    return c;
}

// ---------------------------------------------------------------------------
// Beta functions

/// f(d) = (d-2) Gamma(d/2 - 1) / (2 pi^(d/2-2)), continued to pi at d = 2.
[[nodiscard]] inline double f_of_d(double d) {
    require(std::isfinite(d) && d >= 2.0 && d <= 4.0, ErrorKind::domain, "f_of_d: d must lie in [2, 4]");
    const double eps = d - 2.0;
    if (eps <= 1e-6) return pi * (1.0 - 0.5 * eps * (std::numbers::egamma + std::log(pi)));
    return eps * numerics::gamma_fn(0.5 * d - 1.0) / (2.0 * std::pow(pi, 0.5 * d - 2.0));
}

struct RGState {
    double kappa = kappa_bkt;
    double y = 0.0;
    double y_tilde = 0.0;
    PtPhase phase = PtPhase::broken;
    double d = 3.0;

    void validate() const {
        require(std::isfinite(kappa) && kappa > 0.0, ErrorKind::domain, "RGState: kappa must be > 0");
        require(std::isfinite(y) && y >= 0.0, ErrorKind::domain, "RGState: y must be >= 0");
        require(std::isfinite(y_tilde) && y_tilde >= 0.0, ErrorKind::domain, "RGState: y_tilde must be >= 0");
        require(std::isfinite(d) && d >= 2.0 && d <= 4.0, ErrorKind::domain, "RGState: d must lie in [2, 4]");
    }

    [[nodiscard]] State<3> couplings() const noexcept { return {kappa, y, y_tilde}; }
};

namespace detail {

inline State<3> beta_raw(const State<3>& g, double sigma, double d, double f) noexcept {
    const double kappa = g[0], y = g[1], yt = g[2];
    return {sigma * four_over_pi2 * yt * yt - kappa * kappa * y * y + (d - 2.0) * kappa,
            (d - f * kappa) * y,
            (d - 4.0 * f / (pi * pi * kappa)) * yt};
}

inline numerics::Jacobian<3> jacobian_raw(const State<3>& g, double sigma, double d, double f) noexcept {
    const double kappa = g[0], y = g[1], yt = g[2];
    numerics::Jacobian<3> j{};
    j[0] = {-2.0 * kappa * y * y + (d - 2.0), -2.0 * kappa * kappa * y, 2.0 * sigma * four_over_pi2 * yt};
    j[1] = {-f * y, d - f * kappa, 0.0};
    j[2] = {4.0 * f * yt / (pi * pi * kappa * kappa), 0.0, d - 4.0 * f / (pi * pi * kappa)};
    return j;
}

inline Matrix to_matrix(const numerics::Jacobian<3>& j) {
    Matrix m(3, 3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = j[r][c];
    return m;
}

} // namespace detail

/// (dkappa/dl, dy/dl, dy_tilde/dl). The y_tilde^2 term enters with + in the
/// PT-symmetric phase and with - in the PT-broken phase.
[[nodiscard]] inline State<3> beta_functions(const RGState& s) {
    s.validate();
    return detail::beta_raw(s.couplings(), phase_sign(s.phase), s.d, f_of_d(s.d));
}

/// Flow in the unreduced couplings (kappa, y, y_r, y_i), for which
/// y_tilde = sqrt|y_r^2 - y_i^2|.
[[nodiscard]] inline State<4> beta_functions_split(const State<4>& g, double d) {
    const double kappa = g[0], y = g[1], yr = g[2], yi = g[3];
    require(kappa > 0.0, ErrorKind::domain, "beta_functions_split: kappa must be > 0");
    const double f = f_of_d(d);
    const double clock = d - 4.0 * f / (pi * pi * kappa);
    return {four_over_pi2 * (yr - yi) * (yr + yi) - kappa * kappa * y * y + (d - 2.0) * kappa, (d - f * kappa) * y,
            clock * yr, clock * yi};
}

/// Analytic Jacobian d(beta)/d(kappa, y, y_tilde).
[[nodiscard]] inline Matrix jacobian(const RGState& s) {
    s.validate();
    return detail::to_matrix(detail::jacobian_raw(s.couplings(), phase_sign(s.phase), s.d, f_of_d(s.d)));
}

/// Central-difference Jacobian of the beta functions.
[[nodiscard]] inline Matrix numeric_jacobian(const RGState& s, double step = 1e-6) {
    s.validate();
    require(step > 0.0 && step < s.kappa, ErrorKind::argument, "numeric_jacobian: step must lie in (0, kappa)");
    const double sigma = phase_sign(s.phase);
    const double f = f_of_d(s.d);
    Matrix m(3, 3);
    const State<3> g0 = s.couplings();
    for (std::size_t c = 0; c < 3; ++c) {
        State<3> gp = g0, gm = g0;
        gp[c] += step;
        gm[c] -= step;
        const State<3> bp = detail::beta_raw(gp, sigma, s.d, f);
        const State<3> bm = detail::beta_raw(gm, sigma, s.d, f);
        for (std::size_t r = 0; r < 3; ++r) m(r, c) = (bp[r] - bm[r]) / (2.0 * step);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Fixed points

enum class Classification { sink, source, saddle, spiral_source, spiral_sink, marginal };

[[nodiscard]] constexpr std::string_view to_string(Classification c) noexcept {
    switch (c) {
        case Classification::sink: return "sink";
        case Classification::source: return "source";
        case Classification::saddle: return "saddle";
        case Classification::spiral_source: return "spiral_source";
        case Classification::spiral_sink: return "spiral_sink";
        case Classification::marginal: return "marginal";
    }
    return "unknown";
}

enum class FixedPointLabel { P1, P2, gaussian, fixed_line_point };

[[nodiscard]] constexpr std::string_view to_string(FixedPointLabel l) noexcept {
    switch (l) {
        case FixedPointLabel::P1: return "P1";
        case FixedPointLabel::P2: return "P2";
        case FixedPointLabel::gaussian: return "gaussian";
        case FixedPointLabel::fixed_line_point: return "fixed_line_point";
    }
    return "unknown";
}

struct FixedPoint {
    FixedPointLabel label = FixedPointLabel::P1;
    State<3> location{};
    Matrix jacobian;
    std::vector<Complex> eigenvalues;
    Classification classification = Classification::marginal;
    double residual = 0.0; ///< max-norm of the beta functions at `location`
    int newton_iterations = 0;
};

inline constexpr double classification_tol = 1e-10;

[[nodiscard]] inline Classification classify(const std::vector<Complex>& eigenvalues,
                                             double tol = classification_tol) {
    bool any_pos = false, any_neg = false, rotating = false;
    for (const auto& z : eigenvalues) {
        if (std::abs(z.real()) <= tol) return Classification::marginal;
        (z.real() > 0.0 ? any_pos : any_neg) = true;
        if (std::abs(z.imag()) > tol) rotating = true;
    }
    if (any_pos && any_neg) return Classification::saddle;
    if (rotating) return any_pos ? Classification::spiral_source : Classification::spiral_sink;
    return any_pos ? Classification::source : Classification::sink;
}

/// P1 = (d/f, sqrt((d-2)/kappa1), 0), present in both phases.
[[nodiscard]] inline State<3> p1_closed_form(double d) {
    const double kappa1 = d / f_of_d(d);
    return {kappa1, std::sqrt((d - 2.0) / kappa1), 0.0};
}

/// P2 = (4f/(pi^2 d), 0, (pi/2) sqrt((d-2) kappa2)), PT-broken phase only.
[[nodiscard]] inline State<3> p2_closed_form(double d) {
    const double kappa2 = 4.0 * f_of_d(d) / (pi * pi * d);
    return {kappa2, 0.0, 0.5 * pi * std::sqrt((d - 2.0) * kappa2)};
}

/// lambda_0 = d - f kappa2 and lambda_pm = [d - 2 +- i sqrt((d-2)(7d+2))]/2 at P2.
[[nodiscard]] inline std::vector<Complex> p2_eigenvalues_closed_form(double d) {
    const double lambda0 = d - f_of_d(d) * p2_closed_form(d)[0];
    const double im = 0.5 * std::sqrt((d - 2.0) * (7.0 * d + 2.0));
    std::vector<Complex> v{{lambda0, 0.0}, {0.5 * (d - 2.0), im}, {0.5 * (d - 2.0), -im}};
    numerics::detail::sort_spectrum(v);
    return v;
}

inline constexpr double fixed_point_tol = 1e-13;

[[nodiscard]] inline FixedPoint refine_fixed_point(const State<3>& seed, PtPhase phase, double d, FixedPointLabel label) {
    const double sigma = phase_sign(phase);
    const double f = f_of_d(d);
    const auto res = numerics::newton_root<3>(
        [&](const State<3>& g) { return detail::beta_raw(g, sigma, d, f); },
        [&](const State<3>& g) { return detail::jacobian_raw(g, sigma, d, f); }, seed, fixed_point_tol);
    FixedPoint fp;
    fp.label = label;
    fp.location = res.x;
    fp.residual = res.residual;
    fp.newton_iterations = res.iterations;
    fp.jacobian = detail::to_matrix(detail::jacobian_raw(res.x, sigma, d, f));
    fp.eigenvalues = numerics::eigenvalues_small(fp.jacobian);
    fp.classification = classify(fp.eigenvalues);
    return fp;
}

/// Nontrivial fixed points for d in (2, 4]: P1 in both phases, P2 only when
/// PT symmetry is broken.
[[nodiscard]] inline std::vector<FixedPoint> fixed_points(double d, PtPhase phase) {
    require(std::isfinite(d) && d > 2.0 && d <= 4.0, ErrorKind::domain, "fixed_points: d must lie in (2, 4]");
    std::vector<FixedPoint> out;
    out.push_back(refine_fixed_point(p1_closed_form(d), phase, d, FixedPointLabel::P1));
    if (phase == PtPhase::broken) out.push_back(refine_fixed_point(p2_closed_form(d), phase, d, FixedPointLabel::P2));
    return out;
}

struct HermitianChannel {
    double kappa = 0.0;
    double y = 0.0;
    double a_plus = 0.0;
    double a_minus = 0.0;
};

/// Linearisation of the (kappa, y) subsystem at P1, the Hermitian XY channel.
[[nodiscard]] inline HermitianChannel hermitian_channel(double d) {
    require(std::isfinite(d) && d > 2.0 && d <= 4.0, ErrorKind::domain, "hermitian_channel: d must lie in (2, 4]");
    const FixedPoint p1 = refine_fixed_point(p1_closed_form(d), PtPhase::symmetric, d, FixedPointLabel::P1);
    Matrix m(2, 2);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) m(r, c) = p1.jacobian(r, c);
    const auto ev = numerics::eigenvalues_small(m);
    require(std::abs(ev[0].imag()) == 0.0 && std::abs(ev[1].imag()) == 0.0, ErrorKind::numeric,
            "hermitian_channel: complex eigenvalues in the (kappa, y) block");
    return {p1.location[0], p1.location[1], ev[1].real(), ev[0].real()};
}

/// a_pm = [2 - d +- sqrt((d-2)(9d-2))]/2
[[nodiscard]] inline std::pair<double, double> hermitian_channel_closed_form(double d) {
    const double root = std::sqrt((d - 2.0) * (9.0 * d - 2.0));
    return {0.5 * (2.0 - d + root), 0.5 * (2.0 - d - root)};
}

// ---------------------------------------------------------------------------
// Fixed line at d = 2 (PT-symmetric): kappa = 2/pi, y = y_tilde = y*

struct FixedLinePoint {
    double y_star = 0.0;
    double leading_eigenvalue = 0.0;
};

struct FixedLineScan {
    std::vector<FixedLinePoint> points;
    double slope = 0.0;             ///< least-squares slope of eigenvalue vs y* through the origin
    double relative_residual = 0.0; ///< ||lambda - slope y*|| / ||lambda||
};

[[nodiscard]] inline double fixed_line_leading_eigenvalue(double y_star) {
    require(std::isfinite(y_star) && y_star >= 0.0 && y_star <= 0.3, ErrorKind::domain,
            "fixed_line_scan: y_star must lie in [0, 0.3]");
    const RGState s{kappa_bkt, y_star, y_star, PtPhase::symmetric, 2.0};
    const auto ev = numerics::eigenvalues_small(numeric_jacobian(s));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : ev)
        if (std::abs(z.imag()) <= 1e-12) best = std::max(best, z.real());
    require(std::isfinite(best), ErrorKind::numeric, "fixed_line_scan: no real eigenvalue");
    return best;
}

[[nodiscard]] inline FixedLineScan fixed_line_scan(std::span<const double> y_star_grid) {
    require(!y_star_grid.empty(), ErrorKind::argument, "fixed_line_scan: empty y_star grid");
    FixedLineScan scan;
    std::vector<double> xs, ls;
    for (double ys : y_star_grid) {
        const double lambda = fixed_line_leading_eigenvalue(ys);
        scan.points.push_back({ys, lambda});
        xs.push_back(ys);
        ls.push_back(lambda);
    }
    if (std::any_of(xs.begin(), xs.end(), [](double v) { return v != 0.0; })) {
        const auto fit = numerics::fit_through_origin(xs, ls);
        scan.slope = fit.slope;
        scan.relative_residual = fit.relative_residual;
    }
    return scan;
}

// ---------------------------------------------------------------------------
// Critical exponents

enum class Regime { hermitian_xy, pt_symmetric_clock, pt_broken };

[[nodiscard]] constexpr std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::hermitian_xy: return "hermitian_xy";
        case Regime::pt_symmetric_clock: return "pt_symmetric_clock";
        case Regime::pt_broken: return "pt_broken";
    }
    return "unknown";
}

inline constexpr double near_collision_window = 0.01;

struct ExponentReport {
    double d = 3.0;
    Regime regime = Regime::pt_broken;
    std::optional<double> nu;
    std::optional<double> nu_epsilon; ///< 1/(2 sqrt(eps)) + 1/8, Hermitian channel only
    std::optional<double> eta;        ///< known only at d = 2
    std::optional<double> beta_op;
    std::optional<Complex> source_eigenvalue;
    bool order_parameter_vanishes = false;
    bool near_collision = false;
};

/// nu_eps = 1/(2 sqrt(eps)) + 1/8 with eps = d - 2.
[[nodiscard]] inline double nu_epsilon_expansion(double d) { return 0.5 / std::sqrt(d - 2.0) + 0.125; }

[[nodiscard]] inline ExponentReport exponent_report(double d, Regime regime, std::optional<double> y_star = {}) {
    require(std::isfinite(d) && d >= 2.0 && d <= 4.0, ErrorKind::domain, "exponent_report: d must lie in [2, 4]");
    ExponentReport r;
    r.d = d;
    r.regime = regime;
    const bool at_two = d == 2.0;

    if (regime == Regime::pt_broken) {
        r.near_collision = d - 2.0 < near_collision_window;
        if (at_two) {
            // P1 and P2 have merged: walking, no fixed point to linearise.
            r.eta = 0.25;
            r.order_parameter_vanishes = true;
            return r;
        }
        const double lambda0 = d - f_of_d(d) * p2_closed_form(d)[0];
        r.source_eigenvalue = Complex(lambda0, 0.0);
        if (lambda0 > 0.0) r.nu = 1.0 / lambda0;
        return r;
    }

    if (at_two) {
        require(regime == Regime::pt_symmetric_clock, ErrorKind::domain,
                "exponent_report: hermitian_xy has no isolated fixed point at d = 2");
        require(y_star.has_value(), ErrorKind::argument,
                "exponent_report: pt_symmetric_clock at d = 2 needs y_star on the fixed line");
        require(*y_star > 0.0, ErrorKind::domain, "exponent_report: y_star must be > 0");
        const double lambda = fixed_line_leading_eigenvalue(*y_star);
        r.source_eigenvalue = Complex(lambda, 0.0);
        r.nu = 1.0 / lambda;
        r.eta = 0.25;
        r.beta_op = *r.nu * *r.eta / 2.0;
        return r;
    }

    // The PT-symmetric clock model is equivalent to a Hermitian one, so both
    // regimes share the XY point P1 for d > 2.
    const auto channel = hermitian_channel(d);
    r.source_eigenvalue = Complex(channel.a_plus, 0.0);
    r.nu = 1.0 / channel.a_plus;
    r.nu_epsilon = nu_epsilon_expansion(d);
    return r;
}

// ---------------------------------------------------------------------------
// Flow integration

enum class StopReason { span_complete, diverged, max_steps, fixed_point, kappa_collapse };

[[nodiscard]] constexpr std::string_view to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::span_complete: return "span_complete";
        case StopReason::diverged: return "diverged";
        case StopReason::max_steps: return "max_steps";
        case StopReason::fixed_point: return "fixed_point";
        case StopReason::kappa_collapse: return "kappa_collapse";
    }
    return "unknown";
}

inline constexpr double fixed_point_radius = 1e-12;
inline constexpr double kappa_floor = 1e-6;

struct RGFlow {
    numerics::FlowTrace<3> trace; ///< states are (kappa, y, y_tilde)
    StopReason reason = StopReason::span_complete;
    PtPhase phase = PtPhase::broken;
    double d = 3.0;
};

/// Integrates the beta functions from s0 up to l_max. Stops early when the
/// flow enters a fixed-point neighbourhood (||beta|| < 1e-12, optional) or
/// kappa collapses below 1e-6.
[[nodiscard]] inline RGFlow integrate_rg_flow(const RGState& s0, double l_max,
                                              const numerics::IntegratorConfig& cfg = {},
                                              bool stop_at_fixed_point = true) {
    s0.validate();
    require(std::isfinite(l_max) && l_max >= 0.0, ErrorKind::argument, "integrate_rg_flow: l_max must be >= 0");
    const double sigma = phase_sign(s0.phase);
    const double d = s0.d;
    const double f = f_of_d(d);
    // y and y_tilde are multiplicatively renormalised, so they never change sign.
    const auto rhs = [&](double, const State<3>& g) { return detail::beta_raw(g, sigma, d, f); };
    const auto fp_margin = [&](const State<3>& g) {
        return stop_at_fixed_point ? numerics::norm_inf(detail::beta_raw(g, sigma, d, f)) - fixed_point_radius
                                   : 1.0;
    };
    const auto event = [&](double, const State<3>& g) { return std::min(fp_margin(g), g[0] - kappa_floor); };

    RGFlow flow;
    flow.phase = s0.phase;
    flow.d = d;
    flow.trace = numerics::integrate_ode<3>(rhs, s0.couplings(), {0.0, l_max}, cfg, event);
    switch (flow.trace.termination) {
        case numerics::Termination::span_complete: flow.reason = StopReason::span_complete; break;
        case numerics::Termination::diverged: flow.reason = StopReason::diverged; break;
        case numerics::Termination::max_steps: flow.reason = StopReason::max_steps; break;
        case numerics::Termination::event: {
            const State<3>& g = flow.trace.final_state();
            flow.reason = g[0] - kappa_floor <= fp_margin(g) ? StopReason::kappa_collapse : StopReason::fixed_point;
            break;
        }
    }
    return flow;
}

} // namespace nhxy::rg
