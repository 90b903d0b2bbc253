#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nhxy/errors.hpp"
#include "nhxy/numerics/matrix.hpp"

namespace nhxy::numerics {

namespace detail {

inline void sort_spectrum(std::vector<Complex>& values) {
    std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

/// Roots of z^2 + e z + f. Complex roots come out as exact conjugates.
inline void quadratic_roots(double e, double f, std::vector<Complex>& out) {
    const double disc = e * e - 4.0 * f;
    if (disc >= 0.0) {
        const double q = -0.5 * (e + std::copysign(std::sqrt(disc), e));
        if (q == 0.0) {
            out.emplace_back(0.0, 0.0);
            out.emplace_back(0.0, 0.0);
        } else {
            out.emplace_back(q, 0.0);
            out.emplace_back(f / q, 0.0);
        }
    } else {
        const double re = -0.5 * e;
        const double im = 0.5 * std::sqrt(-disc);
        out.emplace_back(re, im);
        out.emplace_back(re, -im);
    }
}

/// One real root of z^3 + a z^2 + b z + c (the largest in magnitude when all
/// three are real), polished by Newton steps.
inline double cubic_real_root(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    double t = 0.0;
    if (disc > 0.0) {
        const double s = std::cbrt(0.5 * std::abs(q) + std::sqrt(disc));
        const double u = q > 0.0 ? -s : s;
        t = u == 0.0 ? 0.0 : u - p / (3.0 * u);
    } else if (p < 0.0) {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        double best = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double cand = r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
            if (k == 0 || std::abs(cand - a / 3.0) > std::abs(best - a / 3.0)) best = cand;
        }
        t = best;
    }
    double z = t - a / 3.0;
    for (int it = 0; it < 4; ++it) {
        const double val = ((z + a) * z + b) * z + c;
        const double der = (3.0 * z + 2.0 * a) * z + b;
        if (der == 0.0) break;
        const double step = val / der;
        const double next = z - step;
        const double next_val = ((next + a) * next + b) * next + c;
        if (!(std::abs(next_val) < std::abs(val))) break;
        z = next;
    }
    return z;
}

// Parlett-Reinsch balancing with radix 2 (exact in binary floating point).
inline void balance(Matrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilised elimination; columns that
// are already reduced are left untouched.
inline void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        std::size_t piv = m;
        for (std::size_t j = m; j < n; ++j) {
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        }
        if (piv != m) {
            for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
            for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
        }
        if (x == 0.0) continue;
        for (std::size_t i = m + 1; i < n; ++i) {
            double y = a(i, m - 1);
            if (y == 0.0) continue;
            y /= x;
            a(i, m - 1) = 0.0;
            for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
            for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
        }
    }
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix (1-based indexing
// internally to keep the classic loop structure readable).
inline std::vector<Complex> hessenberg_qr(Matrix& h) {
    const int n = static_cast<int>(h.rows());
    auto a = [&h](int i, int j) -> double& { return h(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)); };
    std::vector<double> wr(static_cast<std::size_t>(n) + 1, 0.0), wi(static_cast<std::size_t>(n) + 1, 0.0);
    auto sign = [](double x, double y) { return y >= 0.0 ? std::abs(x) : -std::abs(x); };

    double anorm = 0.0;
    for (int i = 1; i <= n; ++i)
        for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

    const long budget = 30L * n;
    long total_its = 0;
    int nn = n;
    double t = 0.0;
    while (nn >= 1) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 2; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 1) l = 1;
            double x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if (total_its >= budget)
                        raise(ErrorKind::eigensolver, "eigenvalues_dense: QR did not converge within " +
                                                          std::to_string(budget) + " iterations");
                    if (its == 10 || its == 20) {
                        // exceptional shift
                        t += x;
                        for (int i = 1; i <= nn; ++i) a(i, i) -= x;
                        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    ++total_its;
                    int m = nn - 2;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            p = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k != nn - 1) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (nn >= 1 && l < nn - 1);
    }

    std::vector<Complex> values;
    values.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) values.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
    return values;
}

inline void require_square_finite(const Matrix& m, const char* who) {
    require(m.is_square(), ErrorKind::argument, std::string(who) + ": matrix must be square");
    require(m.all_finite(), ErrorKind::numeric, std::string(who) + ": non-finite matrix entry");
}

} // namespace detail

/// Full spectrum of a dense real matrix: balancing, Hessenberg reduction and
/// shifted QR. Sorted by real part, then imaginary part.
[[nodiscard]] inline std::vector<Complex> eigenvalues_dense(const Matrix& matrix) {
    detail::require_square_finite(matrix, "eigenvalues_dense");
    require(matrix.rows() <= 512, ErrorKind::argument, "eigenvalues_dense: n must be <= 512");
    if (matrix.rows() == 0) return {};
    Matrix a = matrix;
    detail::balance(a);
    detail::hessenberg(a);
    std::vector<Complex> values = detail::hessenberg_qr(a);
    detail::sort_spectrum(values);
    return values;
}

/// Eigenvalues of a real n x n matrix with n <= 8. Closed forms for n <= 3
/// (quadratic, Cardano with trigonometric branch); QR for larger n.
[[nodiscard]] inline std::vector<Complex> eigenvalues_small(const Matrix& m) {
    detail::require_square_finite(m, "eigenvalues_small");
    const std::size_t n = m.rows();
    require(n >= 1 && n <= 8, ErrorKind::argument, "eigenvalues_small: n must be in 1..8");
    std::vector<Complex> values;
    values.reserve(n);
    if (n == 1) {
        values.emplace_back(m(0, 0), 0.0);
    } else if (n == 2) {
        const double tr = m(0, 0) + m(1, 1);
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        detail::quadratic_roots(-tr, det, values);
    } else if (n == 3) {
        const double tr = m(0, 0) + m(1, 1) + m(2, 2);
        const double minors = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) + (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) +
                              (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
        const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        const double a = -tr, b = minors, c = -det;
        const double r = detail::cubic_real_root(a, b, c);
        values.emplace_back(r, 0.0);
        const double e = a + r;
        detail::quadratic_roots(e, b + r * e, values);
    } else {
        return eigenvalues_dense(m);
    }
    detail::sort_spectrum(values);
    return values;
}

} // namespace nhxy::numerics
