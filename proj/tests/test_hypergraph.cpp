#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "relsim/hypergraph.hpp"
#include "support/generators.hpp"

using namespace relsim;

namespace {

Hypergraph person_graph() {
    Hypergraph h;
    h.declare_vertex_type("Person", {{"gender", AttrKind::discrete},
                                     {"age", AttrKind::continuous}});
    h.declare_edge_type("Friends", 2);
    return h;
}

} // namespace

TEST_CASE("add_vertex stores values and rejects bad input") {
    Hypergraph h = person_graph();
    const Vertex& john = h.add_vertex("Person", "john",
                                      {{"gender", std::string("m")}, {"age", 23.0}});
    CHECK(john.id == "john");
    CHECK(std::get<std::string>(*john.values[0]) == "m");
    CHECK(std::get<double>(*john.values[1]) == 23.0);
    CHECK(h.incident_edges("john").empty());

    SUBCASE("duplicate id") {
        CHECK_THROWS_WITH_AS(h.add_vertex("Person", "john", {}), doctest::Contains("john"),
                             Error);
        try {
            h.add_vertex("Person", "john", {});
        } catch (const Error& e) {
            CHECK(e.code() == errc::duplicate_id);
        }
    }
    SUBCASE("wrong kind") {
        try {
            h.add_vertex("Person", "ann", {{"age", std::string("x")}});
            FAIL("expected SchemaMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == errc::schema_mismatch);
        }
    }
    SUBCASE("unknown attribute") {
        try {
            h.add_vertex("Person", "ann", {{"height", 1.8}});
            FAIL("expected SchemaMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == errc::schema_mismatch);
        }
    }
    SUBCASE("unknown type") {
        try {
            h.add_vertex("Robot", "r2", {});
            FAIL("expected UnknownType");
        } catch (const Error& e) {
            CHECK(e.code() == errc::unknown_type);
        }
    }
    SUBCASE("missing values are fine") {
        const Vertex& lisa = h.add_vertex("Person", "lisa", {{"gender", std::string("f")}});
        CHECK(!lisa.values[1].has_value());
        CHECK(h.validate().empty());
    }
}

TEST_CASE("add_hyperedge mirrors membership into the incidence index") {
    Hypergraph h = person_graph();
    h.add_vertex("Person", "a", {});
    h.add_vertex("Person", "c", {});
    h.add_hyperedge("Friends", {"a", "c"});
    REQUIRE(h.incident_edges("a").size() == 1);
    CHECK(h.incident_edges("a")[0].position == 1);
    REQUIRE(h.incident_edges("c").size() == 1);
    CHECK(h.incident_edges("c")[0].position == 2);

    SUBCASE("arity mismatch") {
        try {
            h.add_hyperedge("Friends", {"a"});
            FAIL("expected ArityMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == errc::arity_mismatch);
        }
    }
    SUBCASE("unknown member") {
        try {
            h.add_hyperedge("Friends", {"a", "zz"});
            FAIL("expected UnknownVertex");
        } catch (const Error& e) {
            CHECK(e.code() == errc::unknown_vertex);
        }
    }
    SUBCASE("same vertex at two positions gets two entries") {
        h.add_hyperedge("Friends", {"a", "a"});
        REQUIRE(h.incident_edges("a").size() == 3);
        CHECK(h.incident_edges("a")[1].position == 1);
        CHECK(h.incident_edges("a")[2].position == 2);
        CHECK(h.incident_edges("a")[1].edge == h.incident_edges("a")[2].edge);
    }
}

TEST_CASE("position type constraints") {
    Hypergraph h;
    h.declare_vertex_type("Person");
    h.declare_vertex_type("Org");
    h.declare_edge_type("WorksFor", 2, {"Person", "Org"});
    h.add_vertex("Person", "p", {});
    h.add_vertex("Org", "o", {});
    CHECK_NOTHROW(h.add_hyperedge("WorksFor", {"p", "o"}));
    try {
        h.add_hyperedge("WorksFor", {"o", "p"});
        FAIL("expected PositionTypeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == errc::position_type_mismatch);
    }
}

TEST_CASE("incident_edges in insertion order, one pair per occupied position") {
    Hypergraph h;
    h.declare_vertex_type("T");
    h.declare_edge_type("E3", 3);
    h.add_vertex("T", "a", {});
    h.add_vertex("T", "b", {});
    h.add_vertex("T", "isolated", {});
    h.add_hyperedge("E3", {"a", "b", "a"});
    const auto& inc = h.incident_edges("a");
    REQUIRE(inc.size() == 2);
    CHECK(inc[0].position == 1);
    CHECK(inc[1].position == 3);
    CHECK(h.incident_edges("isolated").empty());
    try {
        h.incident_edges("nope");
        FAIL("expected UnknownVertex");
    } catch (const Error& e) {
        CHECK(e.code() == errc::unknown_vertex);
    }
}

TEST_CASE("validate flags hand-made corruption") {
    SUBCASE("fresh graph is clean") {
        Hypergraph h = person_graph();
        h.add_vertex("Person", "a", {});
        h.add_vertex("Person", "b", {});
        h.add_hyperedge("Friends", {"a", "b"});
        CHECK(h.validate().empty());
    }
    SUBCASE("corrupted incidence names the vertex and the edge") {
        std::vector<VertexType> vt{{"T", {}}};
        std::vector<EdgeType> et{{"E", 2, {}}};
        std::vector<Vertex> vs{{"a", 0, {}}, {"b", 0, {}}};
        std::vector<Hyperedge> es{{0, {0, 1}}};
        // vertex b's entry is missing
        std::vector<std::vector<IncidenceEntry>> inc{{{0, 1}}, {}};
        Hypergraph h = Hypergraph::from_parts(vt, et, vs, es, inc);
        const auto report = h.validate();
        REQUIRE(!report.empty());
        bool mentions = false;
        for (const auto& entry : report)
            if (entry.find("b") != std::string::npos && entry.find("E") != std::string::npos)
                mentions = true;
        CHECK(mentions);
    }
    SUBCASE("non-finite continuous value") {
        std::vector<VertexType> vt{{"T", {{"x", AttrKind::continuous}}}};
        std::vector<Vertex> vs{{"a", 0, {AttributeValue(std::numeric_limits<double>::infinity())}}};
        Hypergraph h = Hypergraph::from_parts(vt, {}, vs, {}, {{}});
        const auto report = h.validate();
        REQUIRE(report.size() == 1);
        CHECK(report[0].find("non-finite") != std::string::npos);
    }
}

TEST_CASE("incidence invariants hold on random graphs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const relsim::Dataset ds = gen::random_dataset(seed);
        const Hypergraph& h = ds.graph;
        CHECK(h.validate().empty());

        std::size_t incidence_total = 0;
        for (std::size_t v = 0; v < h.vertex_count(); ++v)
            incidence_total += h.incident_edges(v).size();
        std::size_t arity_total = 0;
        for (std::size_t e = 0; e < h.edge_count(); ++e) arity_total += h.edge(e).members.size();
        CHECK(incidence_total == arity_total);

        for (std::size_t e = 0; e < h.edge_count(); ++e) {
            const Hyperedge& edge = h.edge(e);
            for (std::size_t p = 0; p < edge.members.size(); ++p) {
                int found = 0;
                for (const IncidenceEntry& entry : h.incident_edges(edge.members[p]))
                    if (entry.edge == e && entry.position == static_cast<int>(p + 1)) ++found;
                CHECK(found == 1);
            }
        }
    }
}
