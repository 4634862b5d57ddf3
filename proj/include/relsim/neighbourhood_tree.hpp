#pragma once

// Per-vertex neighbourhood summaries built by breadth-first expansion over
// the hyperedges, to a fixed depth. The tree keeps, per level, the multiset
// of vertices reached, the multiset of (edge type, parent position) labels
// traversed, and per (vertex type, attribute) the multiset of attribute
// values observed. Level 0 holds the root's own values.
//
// Expansion rules:
//   - a frontier vertex u traverses every incident (edge, position) pair;
//     each traversal contributes one edge label, whether or not it yields
//     children;
//   - the children of u are the distinct vertices occupying the other
//     positions of those edges; each parent contributes each of its
//     children once per level, so a vertex reached from several parents
//     accumulates multiplicity;
//   - the root is never added to any level;
//   - the frontier for the next level is the set of distinct vertices at
//     the current level, with no memory of earlier expansions.
//
// Trees are immutable once built and share nothing mutable, so building
// all N trees in parallel and reading them concurrently is safe.

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "relsim/error.hpp"
#include "relsim/hypergraph.hpp"

namespace relsim {

struct EdgeLabel {
    std::size_t edge_type = 0;
    int parent_position = 1; // 1-based
    auto operator<=>(const EdgeLabel&) const = default;
};

// Counted multiset of discrete tokens.
struct DiscreteMultiset {
    std::map<std::string, int> counts;
    int total = 0;

    void add(const std::string& token, int n = 1) {
        counts[token] += n;
        total += n;
    }
    bool empty() const noexcept { return total == 0; }
    bool operator==(const DiscreteMultiset&) const = default;
};

// Counted multiset of real values plus cached aggregates.
struct ContinuousMultiset {
    std::map<double, int> counts;
    int total = 0;
    double mean = 0.0;
    double stddev = 0.0; // population convention: a singleton has stddev 0

    void add(double value, int n = 1) {
        counts[value] += n;
        total += n;
    }
    bool empty() const noexcept { return total == 0; }

    void finalize() {
        if (total == 0) return;
        double sum = 0.0;
        for (const auto& [v, c] : counts) sum += v * c;
        mean = sum / total;
        double sq = 0.0;
        for (const auto& [v, c] : counts) sq += (v - mean) * (v - mean) * c;
        stddev = std::sqrt(sq / total);
    }
};

class NeighbourhoodTree {
public:
    using VertexMultiset = std::map<std::size_t, int>;            // vertex index -> count
    using EdgeLabelMultiset = std::map<EdgeLabel, int>;           // label -> count
    using TypeAttrKey = std::pair<std::size_t, std::size_t>;      // (vertex type, attribute)

    struct Level {
        VertexMultiset vertices;
        std::map<std::size_t, VertexMultiset> vertices_by_type;
        EdgeLabelMultiset edge_labels;
        std::map<TypeAttrKey, DiscreteMultiset> discrete_values;
        std::map<TypeAttrKey, ContinuousMultiset> continuous_values;
    };

    static NeighbourhoodTree build(const Hypergraph& h, std::size_t root, int depth) {
        if (depth < 1) raise(errc::invalid_depth, "tree depth must be >= 1");
        if (root >= h.vertex_count()) raise(errc::unknown_vertex, "root index out of range");
        NeighbourhoodTree t;
        t.graph_ = &h;
        t.root_ = root;
        t.depth_ = depth;
        t.levels_.resize(static_cast<std::size_t>(depth) + 1);

        t.record_vertex_values(t.levels_[0], root, 1);

        std::vector<std::size_t> frontier{root};
        for (int l = 1; l <= depth; ++l) {
            Level& level = t.levels_[static_cast<std::size_t>(l)];
            for (std::size_t u : frontier) {
                std::set<std::size_t> children;
                for (const IncidenceEntry& inc : h.incident_edges(u)) {
                    const Hyperedge& e = h.edge(inc.edge);
                    level.edge_labels[{e.type, inc.position}]++;
                    for (std::size_t q = 0; q < e.members.size(); ++q) {
                        if (static_cast<int>(q + 1) == inc.position) continue;
                        std::size_t m = e.members[q];
                        if (m == root) continue;
                        children.insert(m);
                    }
                }
                for (std::size_t c : children) level.vertices[c]++;
            }
            for (const auto& [v, count] : level.vertices) {
                level.vertices_by_type[h.vertex(v).type][v] += count;
                t.record_vertex_values(level, v, count);
            }
            frontier.clear();
            frontier.reserve(level.vertices.size());
            for (const auto& [v, count] : level.vertices) frontier.push_back(v);
        }
        for (Level& level : t.levels_)
            for (auto& [key, ms] : level.continuous_values) ms.finalize();
        return t;
    }

    const Hypergraph& graph() const noexcept { return *graph_; }
    std::size_t root() const noexcept { return root_; }
    int depth() const noexcept { return depth_; }

    // Level-l vertex multiset, l in 1..depth.
    const VertexMultiset& level_vertices(int level) const {
        check_level(level, 1);
        return levels_[static_cast<std::size_t>(level)].vertices;
    }

    const EdgeLabelMultiset& level_edge_labels(int level) const {
        check_level(level, 1);
        return levels_[static_cast<std::size_t>(level)].edge_labels;
    }

    // Restriction of the level-l multiset to one vertex type, multiplicities kept.
    const VertexMultiset& level_vertices_of_type(int level, std::size_t type) const {
        check_level(level, 1);
        auto& by_type = levels_[static_cast<std::size_t>(level)].vertices_by_type;
        auto it = by_type.find(type);
        return it == by_type.end() ? empty_vertices_ : it->second;
    }

    const VertexMultiset& level_vertices_of_type(int level, std::string_view type_name) const {
        return level_vertices_of_type(level, graph_->vertex_type_id(type_name));
    }

    // Attribute-value multisets; level 0 denotes the root's own values.
    const DiscreteMultiset& discrete_values(int level, std::size_t type, std::size_t attr) const {
        check_attr(level, type, attr, AttrKind::discrete);
        auto& values = levels_[static_cast<std::size_t>(level)].discrete_values;
        auto it = values.find({type, attr});
        return it == values.end() ? empty_discrete_ : it->second;
    }

    const ContinuousMultiset& continuous_values(int level, std::size_t type, std::size_t attr) const {
        check_attr(level, type, attr, AttrKind::continuous);
        auto& values = levels_[static_cast<std::size_t>(level)].continuous_values;
        auto it = values.find({type, attr});
        return it == values.end() ? empty_continuous_ : it->second;
    }

    const Level& level(int l) const {
        check_level(l, 0);
        return levels_[static_cast<std::size_t>(l)];
    }

private:
    void record_vertex_values(Level& level, std::size_t v, int count) {
        const Vertex& vx = graph_->vertex(v);
        const VertexType& vt = graph_->vertex_type(vx.type);
        for (std::size_t ai = 0; ai < vx.values.size(); ++ai) {
            if (!vx.values[ai]) continue; // missing values never enter the multisets
            if (vt.attributes[ai].kind == AttrKind::discrete)
                level.discrete_values[{vx.type, ai}].add(std::get<std::string>(*vx.values[ai]), count);
            else
                level.continuous_values[{vx.type, ai}].add(std::get<double>(*vx.values[ai]), count);
        }
    }

    void check_level(int level, int lowest) const {
        if (level < lowest || level > depth_)
            raise(errc::level_out_of_range,
                  "level " + std::to_string(level) + " outside " + std::to_string(lowest) + ".." +
                      std::to_string(depth_));
    }

    void check_attr(int level, std::size_t type, std::size_t attr, AttrKind kind) const {
        check_level(level, 0);
        if (type >= graph_->vertex_type_count())
            raise(errc::unknown_type, "vertex type index out of range");
        const VertexType& vt = graph_->vertex_type(type);
        if (attr >= vt.attributes.size())
            raise(errc::unknown_attribute,
                  "type " + vt.name + " has no attribute index " + std::to_string(attr));
        if (vt.attributes[attr].kind != kind)
            raise(errc::unknown_attribute,
                  "attribute " + vt.attributes[attr].name + " of " + vt.name + " has the other kind");
    }

    const Hypergraph* graph_ = nullptr;
    std::size_t root_ = 0;
    int depth_ = 0;
    std::vector<Level> levels_;

    inline static const VertexMultiset empty_vertices_{};
    inline static const DiscreteMultiset empty_discrete_{};
    inline static const ContinuousMultiset empty_continuous_{};
};

inline NeighbourhoodTree build_tree(const Hypergraph& h, std::string_view root_id, int depth) {
    return NeighbourhoodTree::build(h, h.vertex_id(root_id), depth);
}

// Number of hyperedges whose member multiset contains both roots, each
// hyperedge counted once. Symmetric in its arguments.
inline int root_link_count(const NeighbourhoodTree& a, const NeighbourhoodTree& b) {
    const Hypergraph& h = a.graph();
    std::set<std::size_t> edges;
    for (const IncidenceEntry& inc : h.incident_edges(a.root())) edges.insert(inc.edge);
    int links = 0;
    for (std::size_t ei : edges) {
        const Hyperedge& e = h.edge(ei);
        for (std::size_t m : e.members) {
            if (m == b.root()) {
                ++links;
                break;
            }
        }
    }
    return links;
}

} // namespace relsim
