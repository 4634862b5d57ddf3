#pragma once

// Dense symmetric eigensolver: cyclic Jacobi rotations. Adequate for the
// matrix sizes clustering works with (hundreds to a few thousand rows).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "relsim/matrix.hpp"

namespace relsim {

struct EigenDecomposition {
    std::vector<double> values; // ascending
    Matrix vectors;             // column c is the eigenvector of values[c]
};

inline double off_diagonal_norm(const Matrix& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            if (i != j) sum += m(i, j) * m(i, j);
    return std::sqrt(sum);
}

// Diagonalizes a symmetric matrix; sweeps until the off-diagonal Frobenius
// norm drops below `tol`. Eigenvectors come back sign-fixed (largest-
// magnitude entry positive) and sorted by ascending eigenvalue.
inline EigenDecomposition jacobi_eigen(const Matrix& input, double tol = 1e-10,
                                       int max_sweeps = 100) {
    const std::size_t n = input.size();
    Matrix a = input;
    Matrix v(n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    for (int sweep = 0; sweep < max_sweeps && off_diagonal_norm(a) >= tol; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n);
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = order[c];
        out.values[c] = a(src, src);
        std::size_t peak = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (std::abs(v(k, src)) > std::abs(v(peak, src))) peak = k;
        const double sign = v(peak, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = sign * v(k, src);
    }
    return out;
}

} // namespace relsim
