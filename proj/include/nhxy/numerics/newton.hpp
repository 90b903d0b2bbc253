#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>

#include "nhxy/errors.hpp"
#include "nhxy/numerics/matrix.hpp"

namespace nhxy::numerics {

template <std::size_t N>
using Jacobian = std::array<State<N>, N>;

template <std::size_t N>
struct NewtonResult {
    State<N> x{};
    int iterations = 0;
    double residual = 0.0; ///< max-norm of f at x
};

inline constexpr int newton_max_iterations = 50;

/// Newton's method for f(x) = 0 with a user-supplied Jacobian. Converged once
/// the max-norm of f drops below `tol`.
template <std::size_t N, typename F, typename J>
    requires std::invocable<F, const State<N>&> && std::invocable<J, const State<N>&>
[[nodiscard]] NewtonResult<N> newton_root(F&& f, J&& jac, const State<N>& x0, double tol) {
    require(tol > 0.0, ErrorKind::argument, "newton_root: tol must be positive");
    NewtonResult<N> result{x0, 0, 0.0};
    State<N> fx = f(result.x);
    result.residual = norm_inf(fx);
    while (!(result.residual < tol)) {
        require(std::isfinite(result.residual), ErrorKind::root_find, "newton_root: non-finite residual");
        if (result.iterations >= newton_max_iterations)
            raise(ErrorKind::root_find, "newton_root: no convergence after " +
                                            std::to_string(newton_max_iterations) + " iterations (residual " +
                                            std::to_string(result.residual) + ")");
        State<N> rhs{};
        for (std::size_t i = 0; i < N; ++i) rhs[i] = -fx[i];
        const State<N> dx = solve_linear<N>(jac(result.x), rhs);
        for (std::size_t i = 0; i < N; ++i) result.x[i] += dx[i];
        ++result.iterations;
        fx = f(result.x);
        result.residual = norm_inf(fx);
    }
    return result;
}

} // namespace nhxy::numerics
