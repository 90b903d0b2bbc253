#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "nhxy/errors.hpp"
#include "nhxy/numerics/matrix.hpp"

namespace nhxy::numerics {

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double initial_step = 1e-3;
    double max_step = 1.0;
    long max_steps = 500000;
    /// Integration stops (reason `diverged`) once any component exceeds this magnitude.
    double divergence_bound = 1e6;

    void validate() const {
        require(rel_tol > 0.0 && abs_tol > 0.0 && initial_step > 0.0 && max_step > 0.0,
                ErrorKind::argument, "IntegratorConfig: tolerances and steps must be positive");
        require(max_steps > 0, ErrorKind::argument, "IntegratorConfig: max_steps must be positive");
        require(divergence_bound > 0.0, ErrorKind::argument, "IntegratorConfig: divergence_bound must be positive");
    }
};

enum class Termination { span_complete, diverged, max_steps, event };

[[nodiscard]] constexpr std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::span_complete: return "span_complete";
        case Termination::diverged: return "diverged";
        case Termination::max_steps: return "max_steps";
        case Termination::event: return "event";
    }
    return "unknown";
}

/// Accepted integrator steps, in integration order.
template <std::size_t N>
struct FlowTrace {
    std::vector<double> l;
    std::vector<State<N>> states;
    Termination termination = Termination::span_complete;
    long rejected_steps = 0;

    [[nodiscard]] std::size_t size() const noexcept { return l.size(); }
    [[nodiscard]] const State<N>& final_state() const { return states.back(); }
    [[nodiscard]] double final_l() const { return l.back(); }
};

/// Placeholder terminal event that never fires.
struct NoEvent {
    template <std::size_t N>
    constexpr double operator()(double, const State<N>&) const noexcept { return 1.0; }
};

namespace detail {

template <std::size_t N>
[[nodiscard]] bool finite_state(const State<N>& y) noexcept {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
[[nodiscard]] State<N> hermite(const State<N>& y0, const State<N>& f0, const State<N>& y1,
                               const State<N>& f1, double h, double theta) noexcept {
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + theta;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    State<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    return out;
}

// Dormand-Prince 5(4) tableau
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

/// Fifth-order Dormand-Prince solution after a single step of size h.
template <std::size_t N, typename Rhs>
[[nodiscard]] State<N> dp5_step(Rhs& rhs, double l, const State<N>& y, const State<N>& k1, double h) {
    State<N> tmp{};
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    const State<N> k2 = rhs(l + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const State<N> k3 = rhs(l + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const State<N> k4 = rhs(l + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const State<N> k5 = rhs(l + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const State<N> k6 = rhs(l + h, tmp);
    State<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    return out;
}

} // namespace detail

/// Integrates dy/dl = rhs(l, y) over `span` with the Dormand-Prince 5(4) pair
/// and a PI step-size controller.
///
/// `event(l, y)` is an optional terminal event: integration stops at the first
/// point where it turns non-positive (located on the cubic Hermite interpolant
/// of the step). If it is already non-positive at the start the trace holds
/// the initial sample only.
template <std::size_t N, typename Rhs, typename Event = NoEvent>
    requires std::invocable<Rhs, double, const State<N>&> &&
             std::invocable<Event, double, const State<N>&>
[[nodiscard]] FlowTrace<N> integrate_ode(Rhs&& rhs, const State<N>& y0, std::pair<double, double> span,
                                         const IntegratorConfig& cfg, Event&& event = {}) {
    using namespace detail;
    cfg.validate();
    const auto [l_start, l_end] = span;
    require(std::isfinite(l_start) && std::isfinite(l_end), ErrorKind::argument, "integrate_ode: non-finite span");
    require(finite_state(y0), ErrorKind::numeric, "integrate_ode: non-finite initial state");

    FlowTrace<N> trace;
    State<N> y = y0;
    double l = l_start;
    State<N> f = rhs(l, y);
    require(finite_state(f), ErrorKind::numeric, "integrate_ode: rhs not finite at initial state");
    trace.l.push_back(l);
    trace.states.push_back(y);

    double g = event(l, y);
    if (g <= 0.0) {
        trace.termination = Termination::event;
        return trace;
    }
    if (l_end == l_start) {
        trace.termination = Termination::span_complete;
        return trace;
    }

    const double dir = l_end > l_start ? 1.0 : -1.0;
    double h = dir * std::min({cfg.initial_step, cfg.max_step, std::abs(l_end - l_start)});
    double err_old = 1e-4;
    bool rejected_last = false;
    constexpr double safety = 0.9;
    constexpr double beta = 0.04;
    constexpr double expo = 0.2 - 0.75 * beta;

    for (long attempt = 0;; ++attempt) {
        if (attempt >= cfg.max_steps) {
            trace.termination = Termination::max_steps;
            return trace;
        }
        if (std::abs(h) < 1e-14)
            raise(ErrorKind::stiffness, "integrate_ode: step size underflow at l = " + std::to_string(l));

        bool last = false;
        if (dir * (l + h - l_end) >= 0.0) {
            h = l_end - l;
            last = true;
        }

        State<N> tmp{};
        const State<N>& k1 = f;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        const State<N> k2 = rhs(l + c2 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const State<N> k3 = rhs(l + c3 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const State<N> k4 = rhs(l + c4 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const State<N> k5 = rhs(l + c5 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const State<N> k6 = rhs(l + h, tmp);
        State<N> y_new{};
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        const State<N> k7 = rhs(l + h, y_new);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / static_cast<double>(N));

        if (!std::isfinite(err) || !finite_state(y_new) || !finite_state(k7)) {
            h *= 0.1;
            rejected_last = true;
            ++trace.rejected_steps;
            continue;
        }

        if (err <= 1.0) {
            const double l_new = last ? l_end : l + h;
            const double g_new = event(l_new, y_new);
            if (g_new <= 0.0) {
                // bracket on the interpolant, then polish with genuine sub-steps so the
                // crossing inherits the fifth-order accuracy of the integrator
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (event(l + mid * h, hermite(y, f, y_new, k7, h, mid)) > 0.0 ? lo : hi) = mid;
                }
                const auto g_at = [&](double theta) { return event(l + theta * h, dp5_step(rhs, l, y, f, theta * h)); };
                const double width = std::max(1e-6, 4.0 * (hi - lo));
                double a = std::max(0.0, lo - width), b = std::min(1.0, hi + width);
                if (!(a == 0.0 || g_at(a) > 0.0)) a = 0.0;
                if (!(b == 1.0 || g_at(b) <= 0.0)) b = 1.0;
                for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
                    const double mid = 0.5 * (a + b);
                    (g_at(mid) > 0.0 ? a : b) = mid;
                }
                trace.l.push_back(l + b * h);
                trace.states.push_back(b == 1.0 ? y_new : dp5_step(rhs, l, y, f, b * h));
                trace.termination = Termination::event;
                return trace;
            }

            l = l_new;
            y = y_new;
            f = k7;
            trace.l.push_back(l);
            trace.states.push_back(y);

            if (norm_inf(y) > cfg.divergence_bound) {
                trace.termination = Termination::diverged;
                return trace;
            }
            if (last) {
                trace.termination = Termination::span_complete;
                return trace;
            }

            const double fac11 = std::pow(err, expo);
            double fac = fac11 / std::pow(err_old, beta);
            fac = std::clamp(fac / safety, 0.1, 5.0);
            double h_new = h / fac;
            if (rejected_last) h_new = dir * std::min(std::abs(h_new), std::abs(h));
            err_old = std::max(err, 1e-4);
            h = dir * std::min(std::abs(h_new), cfg.max_step);
            rejected_last = false;
        } else {
            const double fac11 = std::pow(err, expo);
            h /= std::min(5.0, fac11 / safety);
            rejected_last = true;
            ++trace.rejected_steps;
        }
    }
}

} // namespace nhxy::numerics
