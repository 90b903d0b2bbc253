#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nhxy/numerics.hpp"
#include "nhxy/rg_core.hpp"
#include "nhxy/walking.hpp"
#include "oracles.hpp"

using namespace nhxy;
using namespace nhxy::numerics;
using Catch::Approx;

namespace {

bool throws_kind(ErrorKind kind, auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("bessel I0 values", "[numerics][bessel]") {
    CHECK(bessel_I0(0.0) == 1.0);
    CHECK(rel_err(bessel_I0(2.0), 2.279585302336067) < 1e-14);
    CHECK(bessel_I0(3.7) == bessel_I0(-3.7));

    // mpmath, 30 digits
    const std::pair<double, double> frozen[] = {
        {1.0, 1.266065877752008},       {12.5, 30596.33515578515},     {15.0, 339649.3732979139},
        {20.0, 43558282.55955353},      {30.0, 781672297823.9775},     {50.0, 2.932553783849336e20},
        {100.0, 1.073751707131074e42},  {300.0, 4.475847367935052e128}, {699.0, 5.631084539969661e301},
    };
    for (const auto& [x, v] : frozen) {
        INFO("x = " << x);
        CHECK(rel_err(bessel_I0(x), v) < 1e-12);
    }
}

TEST_CASE("bessel I0 agrees with independent series and integral", "[numerics][bessel][property]") {
    for (double x = 0.0; x <= 40.0; x += 0.37) {
        INFO("x = " << x);
        CHECK(rel_err(bessel_I0(x), oracle::bessel_I0_series(x)) < 1e-12);
        CHECK(rel_err(bessel_I0(x), oracle::bessel_I0_integral(x)) < 1e-12);
    }
}

TEST_CASE("bessel I0 range guard", "[numerics][bessel][errors]") {
    CHECK(throws_kind(ErrorKind::range, [] { (void)bessel_I0(700.0); }));
    CHECK(throws_kind(ErrorKind::range, [] { (void)bessel_I0(-800.0); }));
    CHECK(throws_kind(ErrorKind::domain, [] { (void)bessel_I0(std::nan("")); }));
}

TEST_CASE("bessel J0 values", "[numerics][bessel]") {
    CHECK(bessel_J0(0.0) == 1.0);
    CHECK(rel_err(bessel_J0(2.0), 0.2238907791412357) < 1e-12);
    CHECK(std::abs(bessel_J0(2.4048256)) < 1e-6);
    CHECK(std::abs(bessel_J0(2.404825557695773)) < 1e-14);
    CHECK(rel_err(bessel_J0(2.0 * std::sqrt(8.0)), 0.04582966485981377) < 1e-10);
}

TEST_CASE("bessel J0 first zero by bisection", "[numerics][bessel]") {
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bessel_J0(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(lo - 2.404825557695773) < 1e-12);
}

TEST_CASE("bessel J0 matches integral representation across all branches", "[numerics][bessel][property]") {
    for (double x = 0.0; x <= 60.0; x += 0.173) {
        INFO("x = " << x);
        const double ref = oracle::bessel_J0_integral(x);
        CHECK(std::abs(bessel_J0(x) - ref) < 1e-10 * std::max(1.0, std::abs(ref)) + 1e-13);
        CHECK(bessel_J0(-x) == bessel_J0(x));
    }
}

TEST_CASE("I0(ix) by quadrature equals J0(x)", "[numerics][bessel][property]") {
    for (double x = 0.0; x <= 10.0; x += 0.25) {
        const Complex z = quadrature_periodic(
            [x](double t) { return std::exp(Complex(0.0, x * std::cos(t))); }, 256);
        INFO("x = " << x);
        CHECK(std::abs(z.real() - bessel_J0(x)) < 1e-10);
        CHECK(std::abs(z.imag()) < 1e-12);
    }
}

TEST_CASE("gamma function", "[numerics][gamma]") {
    CHECK(rel_err(gamma_fn(0.5), std::sqrt(std::numbers::pi)) < 1e-13);
    CHECK(rel_err(gamma_fn(1.0), 1.0) < 1e-14);
    CHECK(rel_err(gamma_fn(1.5), 0.5 * std::sqrt(std::numbers::pi)) < 1e-13);
    for (double x = -4.75; x < 30.0; x += 0.31) {
        if (std::floor(x) == x) continue;
        INFO("x = " << x);
        CHECK(rel_err(gamma_fn(x), static_cast<double>(std::tgamma(static_cast<long double>(x)))) < 1e-12);
    }
    CHECK(throws_kind(ErrorKind::domain, [] { (void)gamma_fn(0.0); }));
    CHECK(throws_kind(ErrorKind::domain, [] { (void)gamma_fn(-3.0); }));
    CHECK(throws_kind(ErrorKind::range, [] { (void)gamma_fn(200.0); }));
}

TEST_CASE("periodic quadrature", "[numerics][quadrature]") {
    const Complex one = quadrature_periodic([](double) { return Complex(1.0, 0.0); }, 16);
    CHECK(std::abs(one - Complex(1.0, 0.0)) < 1e-15);
    const Complex orth = quadrature_periodic([](double t) { return std::exp(Complex(0.0, t)); }, 64);
    CHECK(std::abs(orth) < 1e-14);
    const Complex i01 = quadrature_periodic([](double t) { return Complex(std::exp(std::cos(t)), 0.0); }, 256);
    CHECK(std::abs(i01.real() - bessel_I0(1.0)) < 1e-12);
    CHECK(std::abs(i01.imag()) < 1e-15);

    CHECK(throws_kind(ErrorKind::argument, [] { (void)quadrature_periodic([](double) { return Complex(1.0); }, 8); }));
    CHECK(throws_kind(ErrorKind::numeric, [] {
        (void)quadrature_periodic([](double t) { return Complex(1.0 / (t - t), 0.0); }, 32);
    }));
}

TEST_CASE("quadrature converges spectrally from 128 to 256 points", "[numerics][quadrature][property]") {
    for (double beta : {0.5, 1.0, 2.0, 4.0})
        for (double J : {0.0, 0.7, 1.5, 2.5})
            for (double K : {0.0, 0.4, 1.3, 2.2}) {
                if (beta * std::hypot(J, K) > 10.0) continue;
                const auto f = [&](double t) { return std::exp(Complex(beta * J * std::cos(t), beta * K * std::sin(t))); };
                const Complex a = quadrature_periodic(f, 128);
                const Complex b = quadrature_periodic(f, 256);
                INFO("beta " << beta << " J " << J << " K " << K);
                CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(b)));
            }
}

TEST_CASE("ode: linear decay and growth", "[numerics][ode]") {
    IntegratorConfig cfg;
    const auto trace = integrate_ode<1>([](double, const State<1>& y) { return State<1>{-y[0]}; }, {1.0}, {0.0, 1.0}, cfg);
    CHECK(trace.termination == Termination::span_complete);
    CHECK(trace.final_l() == 1.0);
    CHECK(std::abs(trace.final_state()[0] - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("ode: exponential solutions within 10 rel_tol", "[numerics][ode][property]") {
    IntegratorConfig cfg;
    for (double lambda = -5.0; lambda <= 5.0; lambda += 0.5) {
        const auto trace = integrate_ode<1>([lambda](double, const State<1>& y) { return State<1>{lambda * y[0]}; },
                                            {1.0}, {0.0, 1.0}, cfg);
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const double exact = std::exp(lambda * trace.l[i]);
            INFO("lambda " << lambda << " l " << trace.l[i]);
            CHECK(std::abs(trace.states[i][0] - exact) <= 10.0 * cfg.rel_tol * std::abs(exact) + cfg.abs_tol);
        }
    }
}

TEST_CASE("ode: backward integration and shifted start", "[numerics][ode]") {
    IntegratorConfig cfg;
    const auto back = integrate_ode<1>([](double, const State<1>& y) { return State<1>{y[0]}; }, {1.0}, {2.0, 0.0}, cfg);
    CHECK(back.final_l() == 0.0);
    CHECK(std::abs(back.final_state()[0] - std::exp(-2.0)) < 1e-9);
}

TEST_CASE("ode: finite-time blow-up reports divergence", "[numerics][ode]") {
    IntegratorConfig cfg;
    const auto trace = integrate_ode<1>([](double, const State<1>& y) { return State<1>{y[0] * y[0]}; }, {1.0},
                                        {0.0, 2.0}, cfg);
    CHECK(trace.termination == Termination::diverged);
    CHECK(trace.final_l() < 1.0);
    CHECK(std::abs(trace.final_state()[0]) > cfg.divergence_bound);
}

TEST_CASE("ode: step budget and validation", "[numerics][ode][errors]") {
    IntegratorConfig cfg;
    cfg.max_steps = 5;
    const auto trace = integrate_ode<1>([](double, const State<1>& y) { return State<1>{-y[0]}; }, {1.0}, {0.0, 100.0}, cfg);
    CHECK(trace.termination == Termination::max_steps);
    CHECK(trace.size() == 6);

    IntegratorConfig bad;
    bad.rel_tol = 0.0;
    CHECK(throws_kind(ErrorKind::argument, [&] {
        (void)integrate_ode<1>([](double, const State<1>& y) { return y; }, {1.0}, {0.0, 1.0}, bad);
    }));
}

TEST_CASE("ode: step underflow is a stiffness error", "[numerics][ode][errors]") {
    IntegratorConfig cfg;
    // dy/dl = 1/(1 - l) has a pole at l = 1 that the divergence bound cannot catch before h collapses
    cfg.divergence_bound = 1e300;
    CHECK(throws_kind(ErrorKind::stiffness, [&] {
        (void)integrate_ode<1>([](double l, const State<1>&) { return State<1>{1.0 / std::sqrt(1.0 - l)}; }, {0.0},
                               {0.0, 2.0}, cfg);
    }));
}

TEST_CASE("ode: terminal event located on the step", "[numerics][ode]") {
    IntegratorConfig cfg;
    const auto trace = integrate_ode<1>([](double, const State<1>& y) { return State<1>{y[0]}; }, {1.0}, {0.0, 5.0},
                                        cfg, [](double, const State<1>& y) { return 2.0 - y[0]; });
    CHECK(trace.termination == Termination::event);
    CHECK(std::abs(trace.final_l() - std::log(2.0)) < 1e-8);
    CHECK(std::abs(trace.final_state()[0] - 2.0) < 1e-8);

    const auto instant = integrate_ode<1>([](double, const State<1>& y) { return y; }, {3.0}, {0.0, 5.0}, cfg,
                                          [](double, const State<1>& y) { return 2.0 - y[0]; });
    CHECK(instant.termination == Termination::event);
    CHECK(instant.size() == 1);
}

TEST_CASE("ode: hyperboloid invariant of the truncated walking flow", "[numerics][ode]") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    const State<3> y0{0.1, 0.2, 0.05};
    // the flow escapes; follow it out to radius 10
    const auto trace = integrate_ode<3>([](double, const State<3>& v) { return walking::walking_beta(v, true); }, y0,
                                        {0.0, 10.0}, cfg, [](double, const State<3>& v) { return 10.0 - norm_inf(v); });
    CHECK(trace.size() > 10);
    const double c0 = walking::invariant_c2(y0);
    for (const auto& v : trace.states) CHECK(std::abs(walking::invariant_c2(v) - c0) < 1e-8);
}

TEST_CASE("newton: scalar and linear problems", "[numerics][newton]") {
    const auto r = newton_root<1>([](const State<1>& x) { return State<1>{x[0] * x[0] - 4.0}; },
                                  [](const State<1>& x) { return Jacobian<1>{State<1>{2.0 * x[0]}}; }, {3.0}, 1e-12);
    CHECK(std::abs(r.x[0] - 2.0) < 1e-12);
    CHECK(r.iterations <= 6);

    const auto lin = newton_root<2>(
        [](const State<2>& x) { return State<2>{x[0] - 1.5, x[1] + 2.0}; },
        [](const State<2>&) { return Jacobian<2>{State<2>{1.0, 0.0}, State<2>{0.0, 1.0}}; }, {10.0, 10.0}, 1e-12);
    CHECK(lin.iterations == 1);
    CHECK(lin.x[0] == 1.5);
    CHECK(lin.x[1] == -2.0);
}

TEST_CASE("newton: recovers P2 from a perturbed start", "[numerics][newton]") {
    const double d = 3.0;
    const double f = rg::f_of_d(d);
    const State<3> p2 = rg::p2_closed_form(d);
    State<3> x0 = p2;
    for (auto& v : x0) v += 1e-3;
    const auto r = newton_root<3>([&](const State<3>& g) { return rg::detail::beta_raw(g, -1.0, d, f); },
                                  [&](const State<3>& g) { return rg::detail::jacobian_raw(g, -1.0, d, f); }, x0,
                                  1e-13);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.x[i] - p2[i]) < 1e-10);
}

TEST_CASE("newton: failures are root-find errors", "[numerics][newton][errors]") {
    CHECK(throws_kind(ErrorKind::root_find, [] {
        (void)newton_root<1>([](const State<1>& x) { return State<1>{x[0] * x[0] + 1.0}; },
                             [](const State<1>& x) { return Jacobian<1>{State<1>{2.0 * x[0]}}; }, {0.5}, 1e-12);
    }));
    CHECK(throws_kind(ErrorKind::root_find, [] {
        (void)newton_root<1>([](const State<1>&) { return State<1>{1.0}; },
                             [](const State<1>&) { return Jacobian<1>{State<1>{0.0}}; }, {0.5}, 1e-12);
    }));
}

TEST_CASE("eigenvalues_small examples", "[numerics][eigen]") {
    const auto diag = eigenvalues_small(Matrix{{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 3.0}});
    REQUIRE(diag.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(diag[k] - Complex(k + 1.0, 0.0)) < 1e-14);

    const auto rot = eigenvalues_small(Matrix{{0.0, -1.0}, {1.0, 0.0}});
    REQUIRE(rot.size() == 2);
    CHECK(std::abs(rot[0] - Complex(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(rot[1] - Complex(0.0, 1.0)) < 1e-15);

    const rg::RGState p2{rg::p2_closed_form(3.0)[0], 0.0, rg::p2_closed_form(3.0)[2], rg::PtPhase::broken, 3.0};
    const auto ev = eigenvalues_small(rg::jacobian(p2));
    const double im = std::sqrt(23.0) / 2.0;
    CHECK(std::abs(ev[0] - Complex(0.5, -im)) < 1e-8);
    CHECK(std::abs(ev[1] - Complex(0.5, im)) < 1e-8);
    CHECK(std::abs(ev[2] - Complex(8.0 / 3.0, 0.0)) < 1e-8);
    CHECK(ev[0] == std::conj(ev[1]));
}

TEST_CASE("eigenvalues_small agrees with eigenvalues_dense", "[numerics][eigen][property]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 1 + trial % 8;
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = u(rng);
        const auto a = eigenvalues_small(m);
        const auto b = eigenvalues_dense(m);
        REQUIRE(a.size() == n);
        REQUIRE(b.size() == n);
        // match each eigenvalue to its nearest partner
        for (const auto& z : a) {
            double best = 1e300;
            for (const auto& w : b) best = std::min(best, std::abs(z - w));
            INFO("trial " << trial << " n " << n);
            CHECK(best < 1e-8);
        }
        for (const auto& z : a) CHECK(std::abs(z) <= m.norm_inf() * (1.0 + 1e-12));
    }
}

TEST_CASE("eigenvalues_small conjugate pairs are exact for 3x3", "[numerics][eigen][property]") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        Matrix m(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) m(i, j) = u(rng);
        const auto ev = eigenvalues_small(m);
        for (const auto& z : ev) CHECK(oracle::eigen_residual(m, z) < 1e-10);
        if (ev[0].imag() != 0.0) CHECK(ev[0] == std::conj(ev[1]));
    }
}

TEST_CASE("eigenvalues_dense: discrete Laplacian", "[numerics][eigen]") {
    const std::size_t n = 16;
    Matrix lap(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        lap(i, i) = 2.0;
        if (i + 1 < n) lap(i, i + 1) = lap(i + 1, i) = -1.0;
    }
    const auto ev = eigenvalues_dense(lap);
    REQUIRE(ev.size() == n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double exact = 2.0 - 2.0 * std::cos(k * std::numbers::pi / 17.0);
        CHECK(std::abs(ev[k - 1].real() - exact) < 1e-9);
        CHECK(ev[k - 1].imag() == 0.0);
    }
}

TEST_CASE("eigenvalues_dense: triangular matrices give their diagonal", "[numerics][eigen]") {
    const std::size_t n = 12;
    Matrix t(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) t(i, j) = i == j ? static_cast<double>(n - i) : 0.3 * (i + j);
    const auto ev = eigenvalues_dense(t);
    for (std::size_t k = 0; k < n; ++k) {
        CHECK(ev[k].real() == static_cast<double>(k + 1));
        CHECK(ev[k].imag() == 0.0);
    }
}

TEST_CASE("eigenvalues_dense: random matrices have small backward error and conjugate pairs", "[numerics][eigen][property]") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t n : {5u, 17u, 40u, 96u}) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = g(rng);
        const auto ev = eigenvalues_dense(m);
        REQUIRE(ev.size() == n);
        int positive = 0, negative = 0;
        for (const auto& z : ev) {
            INFO("n " << n << " lambda " << z);
            CHECK(oracle::eigen_residual(m, z) < 1e-8);
            if (z.imag() > 0.0) ++positive;
            if (z.imag() < 0.0) ++negative;
            double best = 1e300;
            for (const auto& w : ev) best = std::min(best, std::abs(std::conj(z) - w));
            CHECK(best < 1e-10 * m.norm_frobenius());
        }
        CHECK(positive == negative);
    }
}

TEST_CASE("eigen solvers reject invalid input", "[numerics][eigen][errors]") {
    CHECK(throws_kind(ErrorKind::argument, [] { (void)eigenvalues_small(Matrix(9, 9)); }));
    CHECK(throws_kind(ErrorKind::argument, [] { (void)eigenvalues_dense(Matrix(513, 513)); }));
    Matrix bad{{1.0, std::nan("")}, {0.0, 1.0}};
    CHECK(throws_kind(ErrorKind::numeric, [&] { (void)eigenvalues_small(bad); }));
    CHECK(eigenvalues_dense(Matrix(0, 0)).empty());
}

TEST_CASE("line fits", "[numerics][fit]") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y{3.0, 5.0, 7.0, 9.0};
    const auto f = fit_line(x, y);
    CHECK(f.slope == Approx(2.0).epsilon(1e-14));
    CHECK(f.intercept == Approx(1.0).epsilon(1e-14));
    CHECK(f.r_squared == Approx(1.0).epsilon(1e-14));

    const std::vector<double> y2{2.0, 4.1, 5.9, 8.0};
    const auto o = fit_through_origin(x, y2);
    // slope = sum(xy)/sum(x^2) = 59.9/30
    CHECK(o.slope == Approx(59.9 / 30.0).epsilon(1e-14));
    CHECK(o.relative_residual > 0.0);
    CHECK(o.relative_residual < 0.02);

    CHECK(throws_kind(ErrorKind::fit, [] { (void)fit_line(std::vector<double>{1.0}, std::vector<double>{1.0}); }));
    CHECK(throws_kind(ErrorKind::fit, [] {
        (void)fit_line(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0});
    }));
}
