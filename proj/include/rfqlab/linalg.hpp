#pragma once

// Tiny dense helpers for the handful of small SPD solves (IRLS, observed
// information). Row-major square matrices.

#include <cmath>
#include <optional>
#include <vector>

namespace rfq {

// In-place Cholesky A = L L^T; returns false if A is not positive definite.
inline bool cholesky(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double lj = std::sqrt(d);
        a[j * n + j] = lj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / lj;
        }
    }
    return true;
}

// Solve A x = b for SPD A; returns nullopt when the factorization fails.
inline std::optional<std::vector<double>> cholesky_solve(std::vector<double> a,
                                                         std::vector<double> b) {
    const std::size_t n = b.size();
    if (!cholesky(a, n)) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) { // forward: L y = b
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) { // backward: L^T x = y
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
        b[ii] = s / a[ii * n + ii];
    }
    return b;
}

// Diagonal of inverse(A) for SPD A via n solves; fine at these sizes.
inline std::optional<std::vector<double>> spd_inverse_diagonal(const std::vector<double>& a,
                                                               std::size_t n) {
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        auto col = cholesky_solve(a, std::move(e));
        if (!col) return std::nullopt;
        diag[i] = (*col)[i];
    }
    return diag;
}

} // namespace rfq
