#pragma once

// The five-component weighted dissimilarity between neighbourhood trees:
//
//   ad  - distance between the roots' own attribute values
//   nad - attribute-value distances over the neighbourhood, per level/type
//   cd  - connection: direct links between the two roots, inverted
//   nd  - vertex-identity distances per level and type
//   ed  - edge-label distances per level
//
// Discrete multisets are compared with the chi-squared distance between
// their relative-frequency distributions; continuous multisets by comparing
// aggregates (mean, standard deviation), each scaled by the global spread of
// that aggregate across every multiset observed in the target trees. Raw
// components are normalized into [0,1] by their maximum over all unordered
// target pairs, then combined as a weighted sum.
//
// All summations run in a fixed canonical order and pairs are written to
// disjoint cells, so matrices are bitwise identical for any worker count.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "relsim/error.hpp"
#include "relsim/ingest.hpp"
#include "relsim/matrix.hpp"
#include "relsim/neighbourhood_tree.hpp"
#include "relsim/parallel.hpp"

namespace relsim {

struct DissimilarityConfig {
    std::array<double, 5> weights{0.2, 0.2, 0.2, 0.2, 0.2}; // w1..w5 for ad,nad,cd,nd,ed
    int depth = 1;
    bool aggregate_mean = true;
    bool aggregate_stddev = true;

    void validate() const {
        if (depth < 1) raise(errc::invalid_depth, "depth must be >= 1");
        if (!aggregate_mean && !aggregate_stddev)
            throw std::invalid_argument("at least one aggregate is required");
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0) raise(errc::weight_sum_invalid, "weights must be nonnegative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            raise(errc::weight_sum_invalid,
                  "weights must sum to 1, got " + std::to_string(sum));
    }
};

// chi-squared distance between the relative-frequency distributions of two
// counted multisets; 0 when both are empty, at most 2.
template <class K>
inline double chi2_distance(const std::map<K, int>& a, const std::map<K, int>& b) {
    long ta = 0, tb = 0;
    for (const auto& [k, c] : a) ta += c;
    for (const auto& [k, c] : b) tb += c;
    if (ta == 0 && tb == 0) return 0.0;
    const double sa = ta ? 1.0 / static_cast<double>(ta) : 0.0;
    const double sb = tb ? 1.0 / static_cast<double>(tb) : 0.0;
    double sum = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        double fa = 0.0, fb = 0.0;
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            fa = ia->second * sa;
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            fb = ib->second * sb;
            ++ib;
        } else {
            fa = ia->second * sa;
            fb = ib->second * sb;
            ++ia;
            ++ib;
        }
        sum += (fa - fb) * (fa - fb) / (fa + fb);
    }
    // frequencies of a side sum to 1 only up to rounding; keep the
    // documented [0,2] range exact
    return sum > 2.0 ? 2.0 : sum;
}

inline double chi2_distance(const DiscreteMultiset& a, const DiscreteMultiset& b) {
    return chi2_distance(a.counts, b.counts);
}

// Global spread (max - min) of an aggregate, per (vertex type, attribute).
struct AggregateRange {
    double mean = 0.0;
    double stddev = 0.0;
};

class AggregateRanges {
public:
    static AggregateRanges compute(const std::vector<NeighbourhoodTree>& trees) {
        AggregateRanges r;
        for (const NeighbourhoodTree& t : trees) {
            for (int l = 0; l <= t.depth(); ++l) {
                for (const auto& [key, ms] : t.level(l).continuous_values) {
                    if (ms.empty()) continue;
                    r.update(r.mean_, key, ms.mean);
                    r.update(r.stddev_, key, ms.stddev);
                }
            }
        }
        return r;
    }

    AggregateRange range(NeighbourhoodTree::TypeAttrKey key) const {
        AggregateRange out;
        if (auto it = mean_.find(key); it != mean_.end()) out.mean = it->second.hi - it->second.lo;
        if (auto it = stddev_.find(key); it != stddev_.end())
            out.stddev = it->second.hi - it->second.lo;
        return out;
    }

private:
    struct MinMax {
        double lo = 0.0, hi = 0.0;
        bool seen = false;
    };
    using Map = std::map<NeighbourhoodTree::TypeAttrKey, MinMax>;

    static void update(Map& m, NeighbourhoodTree::TypeAttrKey key, double v) {
        MinMax& mm = m[key];
        if (!mm.seen) {
            mm.lo = mm.hi = v;
            mm.seen = true;
        } else {
            if (v < mm.lo) mm.lo = v;
            if (v > mm.hi) mm.hi = v;
        }
    }

    Map mean_;
    Map stddev_;
};

// Aggregate comparison of two continuous-value multisets. A pair with an
// empty side contributes 0, as does an aggregate whose global spread is 0.
inline double continuous_distance(const ContinuousMultiset& a, const ContinuousMultiset& b,
                                  const AggregateRange& r, bool use_mean = true,
                                  bool use_stddev = true) {
    if (a.empty() || b.empty()) return 0.0;
    double sum = 0.0;
    if (use_mean && r.mean > 0.0) sum += std::abs(a.mean - b.mean) / r.mean;
    if (use_stddev && r.stddev > 0.0) sum += std::abs(a.stddev - b.stddev) / r.stddev;
    return sum;
}

struct RawComponents {
    double ad = 0.0, nad = 0.0, cd = 0.0, nd = 0.0, ed = 0.0;
};

// Pre-normalization component values for one tree pair. Both trees must be
// built over the same hypergraph at cfg.depth; the roots are expected to
// share the target type.
inline RawComponents raw_components(const NeighbourhoodTree& a, const NeighbourhoodTree& b,
                                    const DissimilarityConfig& cfg, const AggregateRanges& ranges) {
    if (a.depth() != cfg.depth || b.depth() != cfg.depth)
        raise(errc::depth_mismatch, "trees were built at a different depth than configured");
    const Hypergraph& h = a.graph();
    RawComponents rc;

    auto attr_distance = [&](int level, std::size_t type, std::size_t attr, AttrKind kind) {
        if (kind == AttrKind::discrete)
            return chi2_distance(a.discrete_values(level, type, attr),
                                 b.discrete_values(level, type, attr));
        return continuous_distance(a.continuous_values(level, type, attr),
                                   b.continuous_values(level, type, attr),
                                   ranges.range({type, attr}), cfg.aggregate_mean,
                                   cfg.aggregate_stddev);
    };

    const std::size_t root_type = h.vertex(a.root()).type;
    const VertexType& rt = h.vertex_type(root_type);
    for (std::size_t ai = 0; ai < rt.attributes.size(); ++ai)
        rc.ad += attr_distance(0, root_type, ai, rt.attributes[ai].kind);

    for (int l = 1; l <= cfg.depth; ++l) {
        for (std::size_t t = 0; t < h.vertex_type_count(); ++t) {
            const VertexType& vt = h.vertex_type(t);
            for (std::size_t ai = 0; ai < vt.attributes.size(); ++ai)
                rc.nad += attr_distance(l, t, ai, vt.attributes[ai].kind);
            rc.nd += chi2_distance(a.level_vertices_of_type(l, t), b.level_vertices_of_type(l, t));
        }
        rc.ed += chi2_distance(a.level_edge_labels(l), b.level_edge_labels(l));
    }

    rc.cd = static_cast<double>(root_link_count(a, b));
    return rc;
}

struct ComponentMatrices {
    std::vector<std::string> ids;
    Matrix ad, nad, cd, nd, ed;
    bool normalized = false;

    static constexpr std::array<const char*, 5> names{"ad", "nad", "cd", "nd", "ed"};

    Matrix& component(std::size_t i) {
        Matrix* m[5] = {&ad, &nad, &cd, &nd, &ed};
        return *m[i];
    }
    const Matrix& component(std::size_t i) const {
        const Matrix* m[5] = {&ad, &nad, &cd, &nd, &ed};
        return *m[i];
    }
};

// Scales ad/nad/nd/ed into [0,1] by their maximum over unordered target
// pairs; cd becomes 1 - cd/max. A component that is zero everywhere stays
// zero, except cd, which becomes all-ones: no links anywhere means maximal
// connection dissimilarity. Values are clamped to [0,1]; only diagonal cd
// cells can need it, since the maxima exclude the diagonal.
inline ComponentMatrices normalize_components(const ComponentMatrices& raw) {
    ComponentMatrices out = raw;
    out.normalized = true;
    const std::size_t n = raw.ad.size();
    for (std::size_t c = 0; c < 5; ++c) {
        const bool inverted = (c == 2); // cd
        const double mx = raw.component(c).max_off_diagonal();
        Matrix& m = out.component(c);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double v;
                if (inverted)
                    v = (mx == 0.0) ? 1.0 : 1.0 - m(i, j) / mx;
                else
                    v = (mx == 0.0) ? 0.0 : m(i, j) / mx;
                if (v < 0.0) v = 0.0;
                if (v > 1.0) v = 1.0;
                m(i, j) = v;
            }
        }
    }
    return out;
}

struct DistanceMatrix {
    Matrix values;
    std::vector<std::string> ids;
    DissimilarityConfig config;
};

// Entrywise weighted sum of the normalized components. Weight sums carry a
// 1e-9 tolerance, so the [0,1] range is enforced at the boundary.
inline DistanceMatrix combine(const ComponentMatrices& norm, const DissimilarityConfig& cfg) {
    cfg.validate();
    const std::size_t n = norm.ad.size();
    DistanceMatrix dm{Matrix(n), norm.ids, cfg};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double v = 0.0;
            for (std::size_t c = 0; c < 5; ++c) v += cfg.weights[c] * norm.component(c)(i, j);
            dm.values(i, j) = v > 1.0 ? 1.0 : v;
        }
    return dm;
}

struct PairwiseResult {
    DistanceMatrix distance;
    ComponentMatrices raw;
    ComponentMatrices normalized;
    std::vector<NeighbourhoodTree> trees; // one per target, in id order
};

// Full pipeline over all unordered pairs of target vertices: build every
// tree once, compute global aggregate ranges, fill the raw component
// matrices pair by pair, normalize, combine.
inline PairwiseResult pairwise_matrix(const Dataset& ds, const DissimilarityConfig& cfg,
                                      unsigned workers = 0) {
    cfg.validate();
    const std::vector<std::size_t> targets = ds.target_vertices();
    const std::size_t n = targets.size();
    if (n < 2)
        raise(errc::too_few_targets,
              "need at least 2 vertices of type " + ds.target_type + ", found " +
                  std::to_string(n));
    workers = resolve_workers(workers);

    PairwiseResult res;
    res.trees.resize(n);
    parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            res.trees[i] = NeighbourhoodTree::build(ds.graph, targets[i], cfg.depth);
    });

    const AggregateRanges ranges = AggregateRanges::compute(res.trees);

    ComponentMatrices& raw = res.raw;
    for (std::size_t c = 0; c < 5; ++c) raw.component(c) = Matrix(n);
    for (std::size_t i = 0; i < n; ++i) raw.ids.push_back(ds.graph.vertex(targets[i]).id);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    parallel_chunks(pairs.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto [i, j] = pairs[p];
            const RawComponents rc = raw_components(res.trees[i], res.trees[j], cfg, ranges);
            raw.ad.set_sym(i, j, rc.ad);
            raw.nad.set_sym(i, j, rc.nad);
            raw.cd.set_sym(i, j, rc.cd);
            raw.nd.set_sym(i, j, rc.nd);
            raw.ed.set_sym(i, j, rc.ed);
        }
    });
    // diagonal self-pairs: only cd can be nonzero
    for (std::size_t i = 0; i < n; ++i)
        raw.cd(i, i) = static_cast<double>(root_link_count(res.trees[i], res.trees[i]));

    res.normalized = normalize_components(raw);
    res.distance = combine(res.normalized, cfg);
    return res;
}

} // namespace relsim
