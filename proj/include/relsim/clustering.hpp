#pragma once

// Clustering over a precomputed distance matrix: agglomerative hierarchical
// clustering cut at k clusters, and normalized spectral clustering on an
// affinity derived from the distances. Both are deterministic given their
// inputs and seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "relsim/error.hpp"
#include "relsim/jacobi.hpp"
#include "relsim/matrix.hpp"

namespace relsim {

struct ClusterAssignment {
    std::vector<std::string> ids;
    std::vector<int> cluster; // index in [0, k), parallel to ids
    int k = 0;
};

enum class Linkage { single, complete, average };

inline Linkage linkage_from_name(const std::string& name) {
    if (name == "single") return Linkage::single;
    if (name == "complete") return Linkage::complete;
    if (name == "average") return Linkage::average;
    raise(errc::parse_error, "unknown linkage '" + name + "'");
}

struct Merge {
    std::size_t a = 0, b = 0; // cluster representatives joined
    double distance = 0.0;
};

namespace detail {

// Relabel so that cluster 0 is the one holding the lowest point index, etc.
inline void canonicalize(ClusterAssignment& out) {
    std::vector<int> remap(static_cast<std::size_t>(out.k), -1);
    int next = 0;
    for (int& c : out.cluster) {
        if (remap[static_cast<std::size_t>(c)] < 0) remap[static_cast<std::size_t>(c)] = next++;
        c = remap[static_cast<std::size_t>(c)];
    }
    out.k = next;
}

} // namespace detail

struct AgglomerativeResult {
    ClusterAssignment assignment;
    std::vector<Merge> merges; // in merge order
};

// Classic Lance-Williams agglomeration. Ties on the merge distance go to
// the smallest (i, j) index pair, which makes runs reproducible.
inline AgglomerativeResult agglomerative_full(const Matrix& dist,
                                              const std::vector<std::string>& ids, int k,
                                              Linkage linkage) {
    const std::size_t n = dist.size();
    if (ids.size() != n)
        raise(errc::dimension_mismatch, "id list does not match the matrix dimension");
    if (k < 1 || static_cast<std::size_t>(k) > n)
        raise(errc::bad_k, "k must be in 1.." + std::to_string(n));
    if (!dist.is_symmetric()) raise(errc::asymmetric_matrix, "distance matrix is not symmetric");

    Matrix d = dist;
    std::vector<bool> active(n, true);
    std::vector<std::size_t> size(n, 1);
    std::vector<int> member(n); // point -> current representative
    for (std::size_t i = 0; i < n; ++i) member[i] = static_cast<int>(i);

    AgglomerativeResult res;
    std::size_t clusters = n;
    while (clusters > static_cast<std::size_t>(k)) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        bool found = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                if (d(i, j) < best) {
                    best = d(i, j);
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        }
        if (!found) break;
        // merge bj into bi
        for (std::size_t m = 0; m < n; ++m) {
            if (!active[m] || m == bi || m == bj) continue;
            double dm;
            switch (linkage) {
                case Linkage::single: dm = std::min(d(m, bi), d(m, bj)); break;
                case Linkage::complete: dm = std::max(d(m, bi), d(m, bj)); break;
                case Linkage::average:
                default:
                    dm = (size[bi] * d(m, bi) + size[bj] * d(m, bj)) /
                         static_cast<double>(size[bi] + size[bj]);
                    break;
            }
            d.set_sym(m, bi, dm);
        }
        size[bi] += size[bj];
        active[bj] = false;
        for (std::size_t p = 0; p < n; ++p)
            if (member[p] == static_cast<int>(bj)) member[p] = static_cast<int>(bi);
        res.merges.push_back({bi, bj, best});
        --clusters;
    }

    res.assignment.ids = ids;
    res.assignment.cluster = std::move(member);
    res.assignment.k = k;
    // representatives -> dense labels, lowest point index first
    std::vector<int> rep_label(n, -1);
    int next = 0;
    for (std::size_t p = 0; p < n; ++p) {
        int rep = res.assignment.cluster[p];
        if (rep_label[static_cast<std::size_t>(rep)] < 0)
            rep_label[static_cast<std::size_t>(rep)] = next++;
        res.assignment.cluster[p] = rep_label[static_cast<std::size_t>(rep)];
    }
    res.assignment.k = next;
    return res;
}

inline ClusterAssignment agglomerative(const Matrix& dist, const std::vector<std::string>& ids,
                                       int k, Linkage linkage = Linkage::average) {
    return agglomerative_full(dist, ids, k, linkage).assignment;
}

// --- spectral ---------------------------------------------------------------

struct SpectralParams {
    enum class Affinity { one_minus, gaussian };
    Affinity affinity = Affinity::one_minus;
    double sigma = 1.0;     // gaussian only
    int kmeans_restarts = 10;
    std::uint64_t seed = 0;

    void validate() const {
        if (affinity == Affinity::gaussian && !(sigma > 0.0))
            raise(errc::parse_error, "gaussian affinity needs sigma > 0");
        if (kmeans_restarts < 1) raise(errc::parse_error, "kmeans restarts must be >= 1");
    }
};

// Affinity from distances; diagonal is zeroed.
inline Matrix affinity_from_distance(const Matrix& dist, const SpectralParams& p) {
    const std::size_t n = dist.size();
    Matrix w(n);
    const double mx = dist.max_value();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (p.affinity == SpectralParams::Affinity::one_minus)
                w(i, j) = mx == 0.0 ? 1.0 : 1.0 - dist(i, j) / mx;
            else
                w(i, j) = std::exp(-dist(i, j) * dist(i, j) / (2.0 * p.sigma * p.sigma));
        }
    }
    return w;
}

// Symmetric normalized Laplacian I - D^(-1/2) W D^(-1/2). A zero-degree row
// gets a tiny self-affinity so the scaling stays finite; the event is
// reported through `warnings`.
inline Matrix normalized_laplacian(Matrix w, std::vector<std::string>* warnings = nullptr) {
    const std::size_t n = w.size();
    std::vector<double> degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += w(i, j);
        if (deg == 0.0) {
            w(i, i) = 1e-12;
            deg = 1e-12;
            if (warnings)
                warnings->push_back("IsolatedVertex: row " + std::to_string(i) +
                                    " has zero affinity everywhere");
        }
        degree[i] = deg;
    }
    Matrix l(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double scaled = w(i, j) / std::sqrt(degree[i] * degree[j]);
            l(i, j) = (i == j ? 1.0 : 0.0) - scaled;
        }
    }
    return l;
}

namespace detail {

// mt19937_64 mapped to [0,1) without distribution objects, which are not
// portable across standard library implementations.
inline double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double sq_dist(const std::vector<double>& rows, std::size_t dim, std::size_t i,
                      const double* center) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double diff = rows[i * dim + d] - center[d];
        s += diff * diff;
    }
    return s;
}

struct KMeansRun {
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

inline KMeansRun kmeans_once(const std::vector<double>& rows, std::size_t n, std::size_t dim,
                             int k, std::mt19937_64& rng) {
    const std::size_t kk = static_cast<std::size_t>(k);
    std::vector<double> centers(kk * dim, 0.0);

    // k-means++ seeding
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t first = std::min<std::size_t>(n - 1, static_cast<std::size_t>(next_unit(rng) * n));
    std::copy_n(rows.begin() + first * dim, dim, centers.begin());
    for (std::size_t c = 1; c < kk; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dd = sq_dist(rows, dim, i, centers.data() + (c - 1) * dim);
            if (dd < d2[i]) d2[i] = dd;
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double target = next_unit(rng) * total, acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = std::min<std::size_t>(n - 1, static_cast<std::size_t>(next_unit(rng) * n));
        }
        std::copy_n(rows.begin() + pick * dim, dim, centers.begin() + c * dim);
    }

    std::vector<int> labels(n, 0);
    std::vector<double> sums(kk * dim);
    std::vector<std::size_t> counts(kk);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < kk; ++c) {
                const double dd = sq_dist(rows, dim, i, centers.data() + c * dim);
                if (dd < bd) {
                    bd = dd;
                    best = static_cast<int>(c);
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            counts[static_cast<std::size_t>(labels[i])]++;
            for (std::size_t d = 0; d < dim; ++d)
                sums[static_cast<std::size_t>(labels[i]) * dim + d] += rows[i * dim + d];
        }
        for (std::size_t c = 0; c < kk; ++c) {
            if (counts[c] > 0) {
                for (std::size_t d = 0; d < dim; ++d)
                    centers[c * dim + d] = sums[c * dim + d] / static_cast<double>(counts[c]);
            } else {
                // steal the point farthest from its center, lowest index on ties
                std::size_t far = 0;
                double fd = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (counts[static_cast<std::size_t>(labels[i])] <= 1) continue;
                    const double dd = sq_dist(rows, dim, i,
                                              centers.data() + static_cast<std::size_t>(labels[i]) * dim);
                    if (dd > fd) {
                        fd = dd;
                        far = i;
                    }
                }
                counts[static_cast<std::size_t>(labels[far])]--;
                labels[far] = static_cast<int>(c);
                counts[c] = 1;
                std::copy_n(rows.begin() + far * dim, dim, centers.begin() + c * dim);
                changed = true;
            }
        }
        if (!changed) break;
    }

    KMeansRun run;
    run.labels = std::move(labels);
    run.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        run.inertia += sq_dist(rows, dim, i,
                               centers.data() + static_cast<std::size_t>(run.labels[i]) * dim);
    return run;
}

} // namespace detail

// Normalized spectral clustering: affinity, symmetric normalized Laplacian,
// the k eigenvectors of the k smallest eigenvalues, row normalization, then
// seeded k-means++ keeping the best of `kmeans_restarts` runs.
inline ClusterAssignment spectral(const Matrix& dist, const std::vector<std::string>& ids, int k,
                                  const SpectralParams& params = {},
                                  std::vector<std::string>* warnings = nullptr) {
    const std::size_t n = dist.size();
    if (ids.size() != n)
        raise(errc::dimension_mismatch, "id list does not match the matrix dimension");
    if (k < 1 || static_cast<std::size_t>(k) > n)
        raise(errc::bad_k, "k must be in 1.." + std::to_string(n));
    params.validate();

    const Matrix w = affinity_from_distance(dist, params);
    const Matrix l = normalized_laplacian(w, warnings);
    const EigenDecomposition eig = jacobi_eigen(l, 1e-10);

    const std::size_t dim = static_cast<std::size_t>(k);
    std::vector<double> rows(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            rows[i * dim + c] = eig.vectors(i, c);
            norm += rows[i * dim + c] * rows[i * dim + c];
        }
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (std::size_t c = 0; c < dim; ++c) rows[i * dim + c] /= norm;
    }

    detail::KMeansRun best;
    for (int r = 0; r < params.kmeans_restarts; ++r) {
        std::mt19937_64 rng(params.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(r) + 1);
        detail::KMeansRun run = detail::kmeans_once(rows, n, dim, k, rng);
        if (run.inertia < best.inertia) best = std::move(run);
    }

    ClusterAssignment out;
    out.ids = ids;
    out.cluster = std::move(best.labels);
    out.k = k;
    detail::canonicalize(out);
    return out;
}

} // namespace relsim
