#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "relsim/clustering.hpp"
#include "relsim/jacobi.hpp"

using namespace relsim;

namespace {

Matrix random_symmetric(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            m.set_sym(i, j, lo + u * (hi - lo));
        }
    return m;
}

// roots of the characteristic polynomial of a symmetric 3x3, by the
// trigonometric cubic formula; a fully independent eigenvalue oracle
std::vector<double> cubic_eigenvalues(const Matrix& m) {
    const double tr = m(0, 0) + m(1, 1) + m(2, 2);
    const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                          m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                       m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    // characteristic polynomial x^3 + a x^2 + b x + c
    const double a = -tr, b = minors, c = -det;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    std::vector<double> roots;
    if (p > -1e-12) {
        roots = {-a / 3.0, -a / 3.0, -a / 3.0}; // (near-)triple root
    } else {
        const double r = std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (2.0 * p * r);
        arg = std::clamp(arg, -1.0, 1.0);
        const double theta = std::acos(arg);
        for (int k = 0; k < 3; ++k)
            roots.push_back(2.0 * r * std::cos((theta - 2.0 * M_PI * k) / 3.0) - a / 3.0);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

Matrix block_distance_matrix(std::size_t block, std::size_t blocks) {
    const std::size_t n = block * blocks;
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = (i / block == j / block || i == j) ? 0.0 : 1.0;
    return m;
}

std::vector<std::string> make_ids(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
    return ids;
}

} // namespace

TEST_CASE("jacobi reconstructs random 5x5 matrices") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const Matrix m = random_symmetric(rng, 5);
        const EigenDecomposition eig = jacobi_eigen(m);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) {
                double v = 0.0;
                for (std::size_t c = 0; c < 5; ++c)
                    v += eig.vectors(i, c) * eig.values[c] * eig.vectors(j, c);
                CHECK(v == doctest::Approx(m(i, j)).epsilon(1e-8));
            }
        for (std::size_t c = 1; c < 5; ++c) CHECK(eig.values[c - 1] <= eig.values[c]);
    }
}

TEST_CASE("jacobi eigenvalues match the characteristic polynomial on 3x3") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const Matrix m = random_symmetric(rng, 3);
        const EigenDecomposition eig = jacobi_eigen(m);
        const std::vector<double> expected = cubic_eigenvalues(m);
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(eig.values[c] == doctest::Approx(expected[c]).epsilon(1e-8));
    }
}

TEST_CASE("agglomerative clustering") {
    SUBCASE("k equal to point count gives singletons") {
        std::mt19937_64 rng(5);
        Matrix m = random_symmetric(rng, 6, 0.1, 1.0);
        for (std::size_t i = 0; i < 6; ++i) m(i, i) = 0.0;
        const ClusterAssignment a = agglomerative(m, make_ids(6), 6, Linkage::average);
        for (std::size_t i = 0; i < 6; ++i) CHECK(a.cluster[i] == static_cast<int>(i));
    }
    SUBCASE("k = 1 gives one cluster") {
        std::mt19937_64 rng(6);
        Matrix m = random_symmetric(rng, 5, 0.1, 1.0);
        for (std::size_t i = 0; i < 5; ++i) m(i, i) = 0.0;
        const ClusterAssignment a = agglomerative(m, make_ids(5), 1, Linkage::complete);
        for (int c : a.cluster) CHECK(c == 0);
    }
    SUBCASE("two zero-distance pairs separate at k = 2") {
        Matrix m(4, 1.0);
        for (std::size_t i = 0; i < 4; ++i) m(i, i) = 0.0;
        m.set_sym(0, 1, 0.0);
        m.set_sym(2, 3, 0.0);
        for (Linkage linkage : {Linkage::single, Linkage::complete, Linkage::average}) {
            const ClusterAssignment a = agglomerative(m, make_ids(4), 2, linkage);
            CHECK(a.cluster[0] == a.cluster[1]);
            CHECK(a.cluster[2] == a.cluster[3]);
            CHECK(a.cluster[0] != a.cluster[2]);
        }
    }
    SUBCASE("bad k") {
        Matrix m(3);
        try {
            agglomerative(m, make_ids(3), 0, Linkage::average);
            FAIL("expected BadK");
        } catch (const Error& e) {
            CHECK(e.code() == errc::bad_k);
        }
        try {
            agglomerative(m, make_ids(3), 4, Linkage::average);
            FAIL("expected BadK");
        } catch (const Error& e) {
            CHECK(e.code() == errc::bad_k);
        }
    }
    SUBCASE("asymmetric input is rejected") {
        Matrix m(3);
        m(0, 1) = 0.5; // no mirror write
        try {
            agglomerative(m, make_ids(3), 2, Linkage::average);
            FAIL("expected AsymmetricMatrix");
        } catch (const Error& e) {
            CHECK(e.code() == errc::asymmetric_matrix);
        }
    }
    SUBCASE("complete-linkage merge distances never decrease") {
        std::mt19937_64 rng(77);
        for (int trial = 0; trial < 15; ++trial) {
            Matrix m = random_symmetric(rng, 12, 0.0, 1.0);
            for (std::size_t i = 0; i < 12; ++i) m(i, i) = 0.0;
            const AgglomerativeResult res =
                agglomerative_full(m, make_ids(12), 1, Linkage::complete);
            for (std::size_t s = 1; s < res.merges.size(); ++s)
                CHECK(res.merges[s - 1].distance <= res.merges[s].distance);
        }
    }
}

TEST_CASE("spectral clustering") {
    SUBCASE("two perfect blocks are recovered exactly") {
        const Matrix m = block_distance_matrix(4, 2);
        const ClusterAssignment a = spectral(m, make_ids(8), 2, SpectralParams{});
        for (std::size_t i = 0; i < 8; ++i) CHECK(a.cluster[i] == (i < 4 ? 0 : 1));
    }
    SUBCASE("three blocks under gaussian affinity") {
        const Matrix m = block_distance_matrix(3, 3);
        SpectralParams p;
        p.affinity = SpectralParams::Affinity::gaussian;
        p.sigma = 0.5;
        const ClusterAssignment a = spectral(m, make_ids(9), 3, p);
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 9; ++j)
                CHECK((a.cluster[i] == a.cluster[j]) == (i / 3 == j / 3));
    }
    SUBCASE("the zero eigenvalue of the laplacian carries D^(1/2)*1") {
        std::mt19937_64 rng(31);
        Matrix dist = random_symmetric(rng, 7, 0.0, 1.0);
        for (std::size_t i = 0; i < 7; ++i) dist(i, i) = 0.0;
        const Matrix w = affinity_from_distance(dist, SpectralParams{});
        std::vector<double> degree(7, 0.0);
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 7; ++j) degree[i] += w(i, j);
        const Matrix l = normalized_laplacian(w);
        for (std::size_t i = 0; i < 7; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < 7; ++j) v += l(i, j) * std::sqrt(degree[j]);
            CHECK(v == doctest::Approx(0.0).epsilon(1e-10));
        }
    }
    SUBCASE("k = n splits distinct rows into singletons") {
        Matrix m(4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                m.set_sym(i, j, 0.2 + 0.17 * static_cast<double>(i + j));
        const ClusterAssignment a = spectral(m, make_ids(4), 4, SpectralParams{});
        std::vector<int> seen = a.cluster;
        std::sort(seen.begin(), seen.end());
        CHECK(seen == std::vector<int>{0, 1, 2, 3});
    }
    SUBCASE("zero-affinity row warns about isolation") {
        Matrix m(3);
        m.set_sym(0, 1, 0.5);
        m.set_sym(0, 2, 1.0);
        m.set_sym(1, 2, 1.0);
        std::vector<std::string> warnings;
        spectral(m, make_ids(3), 2, SpectralParams{}, &warnings);
        REQUIRE(!warnings.empty());
        CHECK(warnings[0].find("IsolatedVertex") != std::string::npos);
    }
    SUBCASE("fixed seed is reproducible") {
        const Matrix m = block_distance_matrix(5, 2);
        SpectralParams p;
        p.seed = 1234;
        const ClusterAssignment a = spectral(m, make_ids(10), 2, p);
        const ClusterAssignment b = spectral(m, make_ids(10), 2, p);
        CHECK(a.cluster == b.cluster);
    }
}
