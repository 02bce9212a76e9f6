#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace collapse {

struct SingularTridiagonal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * @brief Thomas algorithm for a tridiagonal system.
 *
 * Solves rows  lower[i-1] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
 * `lower` and `upper` have length n-1.  Throws SingularTridiagonal on a
 * vanishing pivot.  `scratch` is resized as needed and may be reused across
 * calls to avoid allocation.
 */
inline void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<const double> rhs,
                              std::span<double> x, std::vector<double>& scratch) {
    const std::size_t n = diag.size();
    if (lower.size() + 1 != n || upper.size() + 1 != n || rhs.size() != n || x.size() != n)
        throw std::invalid_argument("solve_tridiagonal: inconsistent sizes");
    scratch.resize(2 * n);
    double* cp = scratch.data();
    double* dp = scratch.data() + n;

    double pivot = diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot))
        throw SingularTridiagonal("tridiagonal solve: zero pivot in row 0");
    cp[0] = (n > 1) ? upper[0] / pivot : 0.0;
    dp[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i - 1] * cp[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw SingularTridiagonal("tridiagonal solve: zero pivot in row " + std::to_string(i));
        cp[i] = (i + 1 < n) ? upper[i] / pivot : 0.0;
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / pivot;
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
}

inline std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
    std::vector<double> x(diag.size());
    std::vector<double> scratch;
    solve_tridiagonal(lower, diag, upper, rhs, x, scratch);
    return x;
}

}  // namespace collapse
