#pragma once

// In-memory model of a typed, labeled, oriented hypergraph.
//
// Vertices carry per-type attribute vectors (discrete tokens or finite
// reals, any value may be missing). Hyperedges are ordered multisets of
// vertices; the same vertex may occupy several positions. An incidence
// index maps each vertex to every (edge, position) it occupies.
//
// Construction is single-writer; once built the graph is immutable and
// safe to share across threads.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "relsim/error.hpp"

namespace relsim {

enum class AttrKind { discrete, continuous };

struct AttributeSchema {
    std::string name;
    AttrKind kind = AttrKind::discrete;
};

struct VertexType {
    std::string name;
    std::vector<AttributeSchema> attributes;

    int attribute_index(std::string_view attr) const noexcept {
        for (std::size_t i = 0; i < attributes.size(); ++i)
            if (attributes[i].name == attr) return static_cast<int>(i);
        return -1;
    }
};

struct EdgeType {
    std::string name;
    int arity = 1;
    // vertex type index per position; empty means unconstrained
    std::vector<std::size_t> position_types;
};

// Discrete token or continuous value; schema decides which alternative is legal.
using AttributeValue = std::variant<std::string, double>;

struct Vertex {
    std::string id;
    std::size_t type = 0;
    std::vector<std::optional<AttributeValue>> values; // parallel to schema
};

struct Hyperedge {
    std::size_t type = 0;
    std::vector<std::size_t> members; // vertex indices, length == arity
};

struct IncidenceEntry {
    std::size_t edge = 0;
    int position = 1; // 1-based, as positions are reported everywhere
    bool operator==(const IncidenceEntry&) const = default;
};

class Hypergraph {
public:
    Hypergraph() = default;

    // --- schema -------------------------------------------------------

    std::size_t declare_vertex_type(std::string name, std::vector<AttributeSchema> attributes = {}) {
        if (vertex_type_index_.count(name) || edge_type_index_.count(name))
            raise(errc::duplicate_id, "type name already declared: " + name);
        std::map<std::string, int> seen;
        for (const auto& a : attributes)
            if (++seen[a.name] > 1)
                raise(errc::schema_mismatch, "duplicate attribute '" + a.name + "' in type " + name);
        vertex_type_index_.emplace(name, vertex_types_.size());
        vertex_types_.push_back({std::move(name), std::move(attributes)});
        return vertex_types_.size() - 1;
    }

    std::size_t declare_edge_type(std::string name, int arity,
                                  const std::vector<std::string>& position_types = {}) {
        if (edge_type_index_.count(name) || vertex_type_index_.count(name))
            raise(errc::duplicate_id, "type name already declared: " + name);
        if (arity < 1)
            raise(errc::arity_mismatch, "edge type " + name + " needs arity >= 1");
        std::vector<std::size_t> pos;
        if (!position_types.empty()) {
            if (static_cast<int>(position_types.size()) != arity)
                raise(errc::arity_mismatch, "position type list of " + name + " must match arity");
            pos.reserve(position_types.size());
            for (const auto& t : position_types) pos.push_back(vertex_type_id(t));
        }
        edge_type_index_.emplace(name, edge_types_.size());
        edge_types_.push_back({std::move(name), arity, std::move(pos)});
        return edge_types_.size() - 1;
    }

    std::size_t vertex_type_id(std::string_view name) const {
        auto it = vertex_type_index_.find(std::string(name));
        if (it == vertex_type_index_.end())
            raise(errc::unknown_type, "vertex type '" + std::string(name) + "' not declared");
        return it->second;
    }

    std::size_t edge_type_id(std::string_view name) const {
        auto it = edge_type_index_.find(std::string(name));
        if (it == edge_type_index_.end())
            raise(errc::unknown_type, "edge type '" + std::string(name) + "' not declared");
        return it->second;
    }

    bool has_vertex_type(std::string_view name) const {
        return vertex_type_index_.count(std::string(name)) > 0;
    }
    bool has_edge_type(std::string_view name) const {
        return edge_type_index_.count(std::string(name)) > 0;
    }

    // --- construction --------------------------------------------------

    const Vertex& add_vertex(std::string_view type, std::string id,
                             const std::vector<std::pair<std::string, AttributeValue>>& values = {}) {
        std::size_t t = vertex_type_id(type);
        if (vertex_index_.count(id))
            raise(errc::duplicate_id, "vertex id '" + id + "' already used");
        const VertexType& vt = vertex_types_[t];
        Vertex v;
        v.id = id;
        v.type = t;
        v.values.resize(vt.attributes.size());
        for (const auto& [name, value] : values) {
            int ai = vt.attribute_index(name);
            if (ai < 0)
                raise(errc::schema_mismatch,
                      "type " + vt.name + " has no attribute '" + name + "'");
            check_kind(vt, ai, value, id);
            v.values[static_cast<std::size_t>(ai)] = value;
        }
        vertex_index_.emplace(std::move(id), vertices_.size());
        vertices_.push_back(std::move(v));
        incidence_.emplace_back();
        return vertices_.back();
    }

    const Hyperedge& add_hyperedge(std::string_view type, const std::vector<std::string>& member_ids) {
        std::size_t t = edge_type_id(type);
        const EdgeType& et = edge_types_[t];
        if (static_cast<int>(member_ids.size()) != et.arity)
            raise(errc::arity_mismatch,
                  "edge type " + et.name + " has arity " + std::to_string(et.arity) +
                      ", got " + std::to_string(member_ids.size()) + " members");
        Hyperedge e;
        e.type = t;
        e.members.reserve(member_ids.size());
        for (std::size_t p = 0; p < member_ids.size(); ++p) {
            std::size_t v = vertex_id(member_ids[p]);
            if (!et.position_types.empty() && vertices_[v].type != et.position_types[p])
                raise(errc::position_type_mismatch,
                      "edge " + et.name + " position " + std::to_string(p + 1) +
                          " requires type " + vertex_types_[et.position_types[p]].name);
            e.members.push_back(v);
        }
        std::size_t eid = hyperedges_.size();
        hyperedges_.push_back(std::move(e));
        const Hyperedge& stored = hyperedges_.back();
        for (std::size_t p = 0; p < stored.members.size(); ++p)
            incidence_[stored.members[p]].push_back({eid, static_cast<int>(p + 1)});
        return stored;
    }

    // Trusted assembly path: installs pre-built tables without any checks.
    // Callers are expected to run validate() afterwards.
    static Hypergraph from_parts(std::vector<VertexType> vertex_types,
                                 std::vector<EdgeType> edge_types,
                                 std::vector<Vertex> vertices,
                                 std::vector<Hyperedge> hyperedges,
                                 std::vector<std::vector<IncidenceEntry>> incidence) {
        Hypergraph h;
        h.vertex_types_ = std::move(vertex_types);
        h.edge_types_ = std::move(edge_types);
        h.vertices_ = std::move(vertices);
        h.hyperedges_ = std::move(hyperedges);
        h.incidence_ = std::move(incidence);
        for (std::size_t i = 0; i < h.vertex_types_.size(); ++i)
            h.vertex_type_index_.emplace(h.vertex_types_[i].name, i);
        for (std::size_t i = 0; i < h.edge_types_.size(); ++i)
            h.edge_type_index_.emplace(h.edge_types_[i].name, i);
        for (std::size_t i = 0; i < h.vertices_.size(); ++i)
            h.vertex_index_.emplace(h.vertices_[i].id, i);
        return h;
    }

    // --- lookup ---------------------------------------------------------

    std::size_t vertex_id(std::string_view id) const {
        auto it = vertex_index_.find(std::string(id));
        if (it == vertex_index_.end())
            raise(errc::unknown_vertex, "vertex '" + std::string(id) + "' does not exist");
        return it->second;
    }

    bool has_vertex(std::string_view id) const { return vertex_index_.count(std::string(id)) > 0; }

    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    std::size_t edge_count() const noexcept { return hyperedges_.size(); }
    std::size_t vertex_type_count() const noexcept { return vertex_types_.size(); }
    std::size_t edge_type_count() const noexcept { return edge_types_.size(); }

    const Vertex& vertex(std::size_t i) const { return vertices_[i]; }
    const Hyperedge& edge(std::size_t i) const { return hyperedges_[i]; }
    const VertexType& vertex_type(std::size_t i) const { return vertex_types_[i]; }
    const EdgeType& edge_type(std::size_t i) const { return edge_types_[i]; }

    // All (edge, position) pairs of a vertex, in insertion order, one per
    // occupied position.
    const std::vector<IncidenceEntry>& incident_edges(std::size_t v) const { return incidence_[v]; }
    const std::vector<IncidenceEntry>& incident_edges(std::string_view id) const {
        return incidence_[vertex_id(id)];
    }

    // --- validation ----------------------------------------------------

    // Returns one entry per invariant violation; empty means consistent.
    std::vector<std::string> validate() const {
        std::vector<std::string> report;
        for (std::size_t vi = 0; vi < vertices_.size(); ++vi) {
            const Vertex& v = vertices_[vi];
            if (v.type >= vertex_types_.size()) {
                report.push_back("vertex " + v.id + " has undeclared type index");
                continue;
            }
            const VertexType& vt = vertex_types_[v.type];
            if (v.values.size() != vt.attributes.size())
                report.push_back("vertex " + v.id + " value vector does not match schema of " + vt.name);
            for (std::size_t ai = 0; ai < v.values.size() && ai < vt.attributes.size(); ++ai) {
                if (!v.values[ai]) continue;
                const AttributeValue& val = *v.values[ai];
                if (vt.attributes[ai].kind == AttrKind::discrete) {
                    if (!std::holds_alternative<std::string>(val))
                        report.push_back("vertex " + v.id + " attribute " + vt.attributes[ai].name +
                                         " should hold a discrete token");
                } else {
                    if (!std::holds_alternative<double>(val))
                        report.push_back("vertex " + v.id + " attribute " + vt.attributes[ai].name +
                                         " should hold a real number");
                    else if (!std::isfinite(std::get<double>(val)))
                        report.push_back("vertex " + v.id + " attribute " + vt.attributes[ai].name +
                                         " holds a non-finite value");
                }
            }
            auto it = vertex_index_.find(v.id);
            if (it == vertex_index_.end() || it->second != vi)
                report.push_back("vertex " + v.id + " missing from the id index");
        }
        for (std::size_t ei = 0; ei < hyperedges_.size(); ++ei) {
            const Hyperedge& e = hyperedges_[ei];
            if (e.type >= edge_types_.size()) {
                report.push_back("hyperedge #" + std::to_string(ei) + " has undeclared type index");
                continue;
            }
            const EdgeType& et = edge_types_[e.type];
            if (static_cast<int>(e.members.size()) != et.arity)
                report.push_back("hyperedge #" + std::to_string(ei) + " of type " + et.name +
                                 " does not match arity");
            for (std::size_t p = 0; p < e.members.size(); ++p) {
                std::size_t m = e.members[p];
                if (m >= vertices_.size()) {
                    report.push_back("hyperedge #" + std::to_string(ei) + " member out of range");
                    continue;
                }
                if (!et.position_types.empty() && p < et.position_types.size() &&
                    vertices_[m].type != et.position_types[p])
                    report.push_back("hyperedge #" + std::to_string(ei) + " of type " + et.name +
                                     " violates position type at " + std::to_string(p + 1));
                // incidence must mirror this occupied position exactly once
                int found = 0;
                for (const IncidenceEntry& inc : incidence_[m])
                    if (inc.edge == ei && inc.position == static_cast<int>(p + 1)) ++found;
                if (found != 1)
                    report.push_back("incidence of vertex " + vertices_[m].id +
                                     " lists hyperedge #" + std::to_string(ei) + " of type " +
                                     et.name + " position " + std::to_string(p + 1) + " " +
                                     std::to_string(found) + " times");
            }
        }
        // no stray incidence entries
        std::size_t incidence_total = 0;
        for (std::size_t vi = 0; vi < incidence_.size(); ++vi) {
            incidence_total += incidence_[vi].size();
            for (const IncidenceEntry& inc : incidence_[vi]) {
                if (inc.edge >= hyperedges_.size()) {
                    report.push_back("incidence of vertex " + vertices_[vi].id +
                                     " references missing hyperedge #" + std::to_string(inc.edge));
                    continue;
                }
                const Hyperedge& e = hyperedges_[inc.edge];
                if (inc.position < 1 || inc.position > static_cast<int>(e.members.size()) ||
                    e.members[static_cast<std::size_t>(inc.position - 1)] != vi)
                    report.push_back("incidence of vertex " + vertices_[vi].id +
                                     " does not mirror hyperedge #" + std::to_string(inc.edge) +
                                     " position " + std::to_string(inc.position));
            }
        }
        std::size_t arity_total = 0;
        for (const Hyperedge& e : hyperedges_) arity_total += e.members.size();
        if (incidence_total != arity_total)
            report.push_back("incidence entry count " + std::to_string(incidence_total) +
                             " does not equal total arity " + std::to_string(arity_total));
        return report;
    }

private:
    static void check_kind(const VertexType& vt, int ai, const AttributeValue& value,
                           const std::string& id) {
        const AttributeSchema& s = vt.attributes[static_cast<std::size_t>(ai)];
        if (s.kind == AttrKind::discrete) {
            if (!std::holds_alternative<std::string>(value))
                raise(errc::schema_mismatch,
                      "attribute " + s.name + " of " + id + " expects a discrete token");
        } else {
            if (!std::holds_alternative<double>(value) || !std::isfinite(std::get<double>(value)))
                raise(errc::schema_mismatch,
                      "attribute " + s.name + " of " + id + " expects a finite real");
        }
    }

    std::vector<VertexType> vertex_types_;
    std::vector<EdgeType> edge_types_;
    std::vector<Vertex> vertices_;
    std::vector<Hyperedge> hyperedges_;
    std::vector<std::vector<IncidenceEntry>> incidence_;
    std::map<std::string, std::size_t> vertex_type_index_;
    std::map<std::string, std::size_t> edge_type_index_;
    std::map<std::string, std::size_t> vertex_index_;
};

} // namespace relsim
