#pragma once

// Truncated Fock-space non-Hermitian clock Hamiltonian
//   H = eps a^dag a - [(J + K) a^N + (J - K) (a^dag)^N] / 2
// together with its Hermitising similarity transformation and the
// coherent-state (semiclassical) energies.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nhxy/errors.hpp"
#include "nhxy/numerics/eigen.hpp"
#include "nhxy/numerics/matrix.hpp"

namespace nhxy::fock {

using numerics::Complex;
using numerics::Matrix;

inline constexpr int max_cutoff = 512;

struct ClockHamiltonianSpec {
    double eps = 1.0;
    double J = 0.0;
    double K = 0.0;
    int N = 4;      ///< clock order
    int cutoff = 64; ///< Fock-space dimension, basis |0> .. |cutoff-1>

    void validate() const {
        require(std::isfinite(eps), ErrorKind::spec, "ClockHamiltonianSpec: eps must be finite");
        require(std::isfinite(J) && J >= 0.0, ErrorKind::spec, "ClockHamiltonianSpec: J must be >= 0");
        require(std::isfinite(K) && K >= 0.0, ErrorKind::spec, "ClockHamiltonianSpec: K must be >= 0");
        require(N >= 1, ErrorKind::spec, "ClockHamiltonianSpec: N must be >= 1");
        require(cutoff >= N, ErrorKind::spec,
                "ClockHamiltonianSpec: cutoff (" + std::to_string(cutoff) + ") < N (" + std::to_string(N) + ")");
        require(cutoff <= max_cutoff, ErrorKind::spec, "ClockHamiltonianSpec: cutoff must be <= 512");
    }
};

struct FockMatrix {
    Matrix entries;
    ClockHamiltonianSpec spec;

    [[nodiscard]] std::size_t dim() const noexcept { return entries.rows(); }
};

enum class PtPhaseLabel { symmetric, broken, exceptional };

[[nodiscard]] constexpr std::string_view to_string(PtPhaseLabel l) noexcept {
    switch (l) {
        case PtPhaseLabel::symmetric: return "symmetric";
        case PtPhaseLabel::broken: return "broken";
        case PtPhaseLabel::exceptional: return "exceptional";
    }
    return "unknown";
}

struct SpectrumReport {
    std::vector<Complex> eigenvalues; ///< sorted by real part, then imaginary part
    double max_abs_imag = 0.0;
    int n_complex_pairs = 0;
    PtPhaseLabel pt_phase_label = PtPhaseLabel::symmetric;
    double tol_imag = 0.0;
};

/// sqrt((m+N)!/m!) = <m| a^N |m+N>, accumulated as a sum of logarithms.
[[nodiscard]] inline double lowering_matrix_element(int m, int N) {
    double log_sum = 0.0;
    for (int j = m + 1; j <= m + N; ++j) log_sum += std::log(static_cast<double>(j));
    return std::exp(0.5 * log_sum);
}

namespace detail {

inline FockMatrix banded(const ClockHamiltonianSpec& spec, double upper, double lower) {
    spec.validate();
    const auto dim = static_cast<std::size_t>(spec.cutoff);
    FockMatrix h{Matrix(dim, dim), spec};
    for (int m = 0; m < spec.cutoff; ++m) h.entries(m, m) = spec.eps * m;
    for (int m = 0; m + spec.N < spec.cutoff; ++m) {
        const double elem = lowering_matrix_element(m, spec.N);
        h.entries(m, m + spec.N) = upper * elem;
        h.entries(m + spec.N, m) = lower * elem;
    }
    return h;
}

} // namespace detail

/// Matrix of H in the truncated Fock basis: a^N fills the upper band
/// (row m, column m+N), (a^dag)^N the lower band.
[[nodiscard]] inline FockMatrix build_clock_hamiltonian(const ClockHamiltonianSpec& spec) {
    return detail::banded(spec, -0.5 * (spec.J + spec.K), -0.5 * (spec.J - spec.K));
}

/// H' = eps a^dag a - sqrt(J^2 - K^2) [a^N + (a^dag)^N] / 2 built directly (J > K).
[[nodiscard]] inline FockMatrix build_hermitian_clock_hamiltonian(const ClockHamiltonianSpec& spec) {
    require(spec.J > spec.K, ErrorKind::pt_broken, "hermitian clock form requires J > K");
    const double g = std::sqrt((spec.J - spec.K) * (spec.J + spec.K));
    return detail::banded(spec, -0.5 * g, -0.5 * g);
}

/// e^{lambda n} H e^{-lambda n} with lambda = artanh(K/J) / N, applied as the
/// exact diagonal conjugation H_ij e^{lambda (i - j)}.
[[nodiscard]] inline FockMatrix similarity_transform(const FockMatrix& h) {
    const auto& spec = h.spec;
    require(spec.J > spec.K, ErrorKind::pt_broken,
            "similarity_transform: requires J > K (the map leaves the real domain when PT symmetry is broken)");
    const double lambda = std::atanh(spec.K / spec.J) / spec.N;
    FockMatrix out = h;
    const std::size_t n = h.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = h.entries(i, j);
            if (v == 0.0 || i == j) continue;
            out.entries(i, j) = v * std::exp(lambda * (static_cast<double>(i) - static_cast<double>(j)));
        }
    return out;
}

/// Number of non-zero entries off the main diagonal.
[[nodiscard]] inline int count_offdiagonal_nonzeros(const FockMatrix& h) {
    int count = 0;
    for (std::size_t i = 0; i < h.dim(); ++i)
        for (std::size_t j = 0; j < h.dim(); ++j)
            if (i != j && h.entries(i, j) != 0.0) ++count;
    return count;
}

/// Exact diagonal similarity D H D^-1 that equalises |H_ij| and |H_ji| on every
/// pair of mirrored non-zeros. Norm balancing cannot see the asymmetry of a
/// banded chain (row and column sums already agree), yet left alone it makes
/// the spectrum conditioned like ((J+K)/|J-K|)^(cutoff/2N). The log-scales are
/// propagated along a spanning forest so that no d_i is ever formed.
[[nodiscard]] inline Matrix magnitude_symmetrized(const Matrix& h) {
    const std::size_t n = h.rows();
    std::vector<double> log_d(n, 0.0);
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack;
    for (std::size_t root = 0; root < n; ++root) {
        if (seen[root]) continue;
        seen[root] = true;
        stack.push_back(root);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j) {
                if (seen[j] || h(i, j) == 0.0 || h(j, i) == 0.0) continue;
                // (D H D^-1)_ij = H_ij d_i / d_j; equal magnitudes need d_j / d_i = sqrt(|H_ij / H_ji|)
                log_d[j] = log_d[i] + 0.5 * (std::log(std::abs(h(i, j))) - std::log(std::abs(h(j, i))));
                seen[j] = true;
                stack.push_back(j);
            }
        }
    }
    Matrix out = h;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && h(i, j) != 0.0) out(i, j) = h(i, j) * std::exp(log_d[i] - log_d[j]);
    return out;
}

/// Spectrum with PT diagnostics. A negative `tol_imag` selects the default
/// 1e-8 * spectral radius.
[[nodiscard]] inline SpectrumReport spectrum_report(const FockMatrix& h, double tol_imag = -1.0) {
    SpectrumReport report;
    report.eigenvalues = numerics::eigenvalues_dense(magnitude_symmetrized(h.entries));
    double radius = 0.0;
    for (const auto& z : report.eigenvalues) {
        radius = std::max(radius, std::abs(z));
        report.max_abs_imag = std::max(report.max_abs_imag, std::abs(z.imag()));
    }
    report.tol_imag = tol_imag >= 0.0 ? tol_imag : 1e-8 * (radius > 0.0 ? radius : 1.0);
    int n_complex = 0;
    for (const auto& z : report.eigenvalues)
        if (std::abs(z.imag()) >= report.tol_imag && z.imag() != 0.0) ++n_complex;
    report.n_complex_pairs = n_complex / 2;

    if (std::abs(h.spec.J - h.spec.K) <= 1e-12) {
        report.pt_phase_label = PtPhaseLabel::exceptional;
    } else if (report.max_abs_imag < report.tol_imag) {
        report.pt_phase_label = PtPhaseLabel::symmetric;
    } else {
        report.pt_phase_label = PtPhaseLabel::broken;
    }
    return report;
}

/// The lowest `count` eigenvalues by real part; truncation artefacts sit at
/// the top of the band, so cross-cutoff comparisons use these.
[[nodiscard]] inline std::vector<Complex> physical_eigenvalues(const SpectrumReport& r, std::size_t count) {
    const std::size_t n = std::min(count, r.eigenvalues.size());
    return {r.eigenvalues.begin(), r.eigenvalues.begin() + static_cast<std::ptrdiff_t>(n)};
}

/// <alpha| H |alpha> = eps |alpha|^2 - |alpha|^N (J cos N theta + i K sin N theta).
[[nodiscard]] inline Complex semiclassical_energy(const ClockHamiltonianSpec& spec, double alpha_abs, double theta) {
    require(alpha_abs >= 0.0 && std::isfinite(alpha_abs), ErrorKind::domain, "semiclassical_energy: |alpha| must be >= 0");
    require(std::isfinite(theta), ErrorKind::domain, "semiclassical_energy: non-finite theta");
    const double amp = std::pow(alpha_abs, spec.N);
    const double nt = spec.N * theta;
    return {spec.eps * alpha_abs * alpha_abs - amp * spec.J * std::cos(nt), -amp * spec.K * std::sin(nt)};
}

enum class WellMode {
    closed, ///< requires |delta_n| < n_total
    open,   ///< gain/loss: n^2 - delta_n^2 may turn negative
};

struct BoseHubbardParams {
    double J_tunnel = 1.0;
    double U = 1.0;
    double mu = 0.0;
    double n_total = 1.0;
    double delta_n = 0.0;     ///< population imbalance n1 - n2
    double delta_theta = 0.0; ///< phase difference theta1 - theta2
    WellMode mode = WellMode::closed;

    void validate() const {
        require(J_tunnel > 0.0 && U > 0.0 && n_total > 0.0, ErrorKind::domain,
                "BoseHubbardParams: J_tunnel, U and n_total must be > 0");
        require(std::isfinite(mu) && std::isfinite(delta_n) && std::isfinite(delta_theta), ErrorKind::domain,
                "BoseHubbardParams: non-finite parameter");
        if (mode == WellMode::closed)
            require(std::abs(delta_n) < n_total, ErrorKind::domain,
                    "BoseHubbardParams: closed wells require |delta_n| < n_total");
    }
};

/// E_n = -(mu + U/2) n + U n^2 / 4
[[nodiscard]] inline double josephson_bulk_energy(const BoseHubbardParams& p) {
    return -(p.mu + 0.5 * p.U) * p.n_total + 0.25 * p.U * p.n_total * p.n_total;
}

/// E_n - J sqrt(n^2 - dn^2) cos(dtheta) + (U/4) dn^2, with the root continued
/// to +i sqrt(dn^2 - n^2) when the imbalance exceeds the total population.
[[nodiscard]] inline Complex josephson_semiclassical(const BoseHubbardParams& p) {
    p.validate();
    const double disc = (p.n_total - p.delta_n) * (p.n_total + p.delta_n);
    const Complex root = disc >= 0.0 ? Complex(std::sqrt(disc), 0.0) : Complex(0.0, std::sqrt(-disc));
    const Complex tunneling = -p.J_tunnel * root * std::cos(p.delta_theta);
    return Complex(josephson_bulk_energy(p) + 0.25 * p.U * p.delta_n * p.delta_n, 0.0) + tunneling;
}

struct GainLossResult {
    double delta_n = 0.0;
    bool pt_broken = false;
    double n_total = 0.0; ///< n1 + n2, unchanged by the gain/loss shift
};

/// n1 = n10 + dg, n2 = n20 - dg: imbalance n10 - n20 + 2 dg, PT broken iff dg > n20.
[[nodiscard]] inline GainLossResult gain_loss_imbalance(double n10, double n20, double delta_gain) {
    require(n10 >= 0.0 && n20 >= 0.0, ErrorKind::domain, "gain_loss_imbalance: populations must be >= 0");
    require(std::isfinite(delta_gain), ErrorKind::domain, "gain_loss_imbalance: non-finite shift");
    const double n1 = n10 + delta_gain;
    const double n2 = n20 - delta_gain;
    GainLossResult r;
    r.delta_n = n1 - n2;
    r.pt_broken = delta_gain > n20;
    r.n_total = n1 + n2;
    return r;
}

} // namespace nhxy::fock
