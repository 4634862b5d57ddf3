#pragma once

// Dense square matrix of doubles. Pairwise results are written through
// set_sym so the stored matrix is symmetric by construction.

#include <cstddef>
#include <cstring>
#include <vector>

namespace relsim {

class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), cells_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }

    void set_sym(std::size_t i, std::size_t j, double v) {
        cells_[i * n_ + j] = v;
        cells_[j * n_ + i] = v;
    }

    const std::vector<double>& cells() const noexcept { return cells_; }

    bool is_symmetric() const noexcept {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (cells_[i * n_ + j] != cells_[j * n_ + i]) return false;
        return true;
    }

    double max_value() const noexcept {
        double m = 0.0;
        for (double v : cells_)
            if (v > m) m = v;
        return m;
    }

    // Maximum over unordered pairs i < j, diagonal excluded.
    double max_off_diagonal() const noexcept {
        double m = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (cells_[i * n_ + j] > m) m = cells_[i * n_ + j];
        return m;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> cells_;
};

// Exact byte-level comparison, used by the determinism checks.
inline bool bitwise_equal(const Matrix& a, const Matrix& b) {
    if (a.size() != b.size()) return false;
    if (a.cells().empty()) return true;
    return std::memcmp(a.cells().data(), b.cells().data(),
                       a.cells().size() * sizeof(double)) == 0;
}

} // namespace relsim
