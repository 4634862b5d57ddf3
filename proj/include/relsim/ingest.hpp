#pragma once

// Text formats: the line-based dataset format, the distance matrix format,
// and a labels file. All parsers report the offending line number.
//
// Dataset files are UTF-8 text, `#` starts a comment, tokens are separated
// by whitespace:
//
//   vertex_type <Name> [<attr>:<discrete|continuous> ...]
//   edge_type <Name> <arity>
//   target <TypeName>                (exactly once)
//   v <TypeName> <id> [<attr>=<value> ...]
//   e <TypeName> <id1> ... <idArity>
//   label <id> <classToken>
//
// Lines are grouped and applied as declarations, then vertices, then edges,
// then labels, so fact lines may appear in any order. Attribute assignments
// on `e` lines are rejected; relationships with non-key attributes must be
// reified into a vertex type first (see README).

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "relsim/error.hpp"
#include "relsim/hypergraph.hpp"
#include "relsim/matrix.hpp"

namespace relsim {

struct Dataset {
    Hypergraph graph;
    std::string target_type;
    std::size_t target_type_id = 0;
    std::map<std::string, std::string> labels; // vertex id -> class token

    // Indices of target-type vertices, in insertion order.
    std::vector<std::size_t> target_vertices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < graph.vertex_count(); ++i)
            if (graph.vertex(i).type == target_type_id) out.push_back(i);
        return out;
    }

    std::vector<std::string> target_ids() const {
        std::vector<std::string> out;
        for (std::size_t v : target_vertices()) out.push_back(graph.vertex(v).id);
        return out;
    }
};

namespace detail {

struct Line {
    int number = 0;
    std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::istream& in) {
    std::vector<Line> lines;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ss(raw);
        Line line{number, {}};
        std::string tok;
        while (ss >> tok) line.tokens.push_back(tok);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] inline void parse_fail(int line, const std::string& reason) {
    raise(errc::parse_error, "line " + std::to_string(line) + ": " + reason);
}

inline double parse_real(const std::string& tok, int line) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + tok.size() || tok.empty())
        parse_fail(line, "expected a real number, got '" + tok + "'");
    return v;
}

inline int parse_int(const std::string& tok, int line) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end != begin + tok.size() || tok.empty())
        parse_fail(line, "expected an integer, got '" + tok + "'");
    return static_cast<int>(v);
}

} // namespace detail

inline Dataset parse_dataset(std::istream& in) {
    using detail::Line;
    using detail::parse_fail;
    const std::vector<Line> lines = detail::tokenize(in);

    Dataset ds;
    std::optional<int> target_line;
    std::string target_name;

    auto rewrap = [](const Error& e, int line) -> Error {
        return Error(e.code(), "line " + std::to_string(line) + ": " + e.detail());
    };

    // declarations
    for (const Line& line : lines) {
        const auto& t = line.tokens;
        try {
            if (t[0] == "vertex_type") {
                if (t.size() < 2) parse_fail(line.number, "vertex_type needs a name");
                std::vector<AttributeSchema> attrs;
                for (std::size_t i = 2; i < t.size(); ++i) {
                    auto colon = t[i].rfind(':');
                    if (colon == std::string::npos || colon == 0)
                        parse_fail(line.number, "attribute must be <name>:<discrete|continuous>");
                    std::string kind = t[i].substr(colon + 1);
                    AttrKind k;
                    if (kind == "discrete")
                        k = AttrKind::discrete;
                    else if (kind == "continuous")
                        k = AttrKind::continuous;
                    else
                        parse_fail(line.number, "unknown attribute kind '" + kind + "'");
                    attrs.push_back({t[i].substr(0, colon), k});
                }
                ds.graph.declare_vertex_type(t[1], std::move(attrs));
            } else if (t[0] == "edge_type") {
                if (t.size() != 3) parse_fail(line.number, "edge_type needs a name and an arity");
                int arity = detail::parse_int(t[2], line.number);
                if (arity < 1) parse_fail(line.number, "arity must be >= 1");
                ds.graph.declare_edge_type(t[1], arity);
            } else if (t[0] == "target") {
                if (t.size() != 2) parse_fail(line.number, "target needs a type name");
                if (target_line)
                    parse_fail(line.number, "target already declared on line " +
                                                std::to_string(*target_line));
                target_line = line.number;
                target_name = t[1];
            } else if (t[0] != "v" && t[0] != "e" && t[0] != "label") {
                parse_fail(line.number, "unknown directive '" + t[0] + "'");
            }
        } catch (const Error& e) {
            if (e.code() == errc::parse_error) throw;
            throw rewrap(e, line.number);
        }
    }
    if (!target_line) raise(errc::parse_error, "missing target declaration");

    // vertices
    for (const Line& line : lines) {
        const auto& t = line.tokens;
        if (t[0] != "v") continue;
        if (t.size() < 3) parse_fail(line.number, "v needs a type and an id");
        if (!ds.graph.has_vertex_type(t[1]))
            raise(errc::unknown_reference,
                  "line " + std::to_string(line.number) + ": vertex type '" + t[1] +
                      "' is not declared");
        std::vector<std::pair<std::string, AttributeValue>> values;
        const VertexType& vt = ds.graph.vertex_type(ds.graph.vertex_type_id(t[1]));
        for (std::size_t i = 3; i < t.size(); ++i) {
            auto eq = t[i].find('=');
            if (eq == std::string::npos || eq == 0)
                parse_fail(line.number, "attribute assignment must be <attr>=<value>");
            std::string name = t[i].substr(0, eq);
            std::string value = t[i].substr(eq + 1);
            int ai = vt.attribute_index(name);
            if (ai >= 0 && vt.attributes[static_cast<std::size_t>(ai)].kind == AttrKind::continuous)
                values.emplace_back(name, detail::parse_real(value, line.number));
            else
                values.emplace_back(name, value); // schema check happens in add_vertex
        }
        try {
            ds.graph.add_vertex(t[1], t[2], values);
        } catch (const Error& e) {
            throw rewrap(e, line.number);
        }
    }

    // hyperedges
    for (const Line& line : lines) {
        const auto& t = line.tokens;
        if (t[0] != "e") continue;
        if (t.size() < 3) parse_fail(line.number, "e needs a type and members");
        if (!ds.graph.has_edge_type(t[1]))
            raise(errc::unknown_reference,
                  "line " + std::to_string(line.number) + ": edge type '" + t[1] +
                      "' is not declared");
        std::vector<std::string> members(t.begin() + 2, t.end());
        for (const std::string& m : members) {
            if (m.find('=') != std::string::npos)
                parse_fail(line.number,
                           "attribute assignments are not allowed on e lines; reify the "
                           "relationship into a vertex type instead");
            if (!ds.graph.has_vertex(m))
                raise(errc::unknown_reference,
                      "line " + std::to_string(line.number) + ": vertex '" + m +
                          "' is not declared");
        }
        try {
            ds.graph.add_hyperedge(t[1], members);
        } catch (const Error& e) {
            throw rewrap(e, line.number);
        }
    }

    // target resolves once all declarations are in
    if (!ds.graph.has_vertex_type(target_name))
        raise(errc::unknown_reference, "line " + std::to_string(*target_line) +
                                           ": target type '" + target_name + "' is not declared");
    ds.target_type = target_name;
    ds.target_type_id = ds.graph.vertex_type_id(target_name);

    // labels
    for (const Line& line : lines) {
        const auto& t = line.tokens;
        if (t[0] != "label") continue;
        if (t.size() != 3) parse_fail(line.number, "label needs an id and a class token");
        if (!ds.graph.has_vertex(t[1]))
            raise(errc::unknown_reference,
                  "line " + std::to_string(line.number) + ": vertex '" + t[1] +
                      "' is not declared");
        std::size_t v = ds.graph.vertex_id(t[1]);
        if (ds.graph.vertex(v).type != ds.target_type_id)
            parse_fail(line.number, "label on '" + t[1] + "' which is not of the target type");
        ds.labels[t[1]] = t[2];
    }

    return ds;
}

inline Dataset parse_dataset(const std::string& text) {
    std::istringstream ss(text);
    return parse_dataset(ss);
}

// --- distance matrix files -------------------------------------------------
//
// First row: comma-separated ids. Each following row: comma-separated values
// with 9 significant digits. Written matrices are symmetric.

inline void write_matrix(std::ostream& out, const Matrix& m, const std::vector<std::string>& ids) {
    if (ids.size() != m.size())
        raise(errc::dimension_mismatch,
              "matrix is " + std::to_string(m.size()) + "x" + std::to_string(m.size()) + " but " +
                  std::to_string(ids.size()) + " ids were given");
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out << ',';
        out << ids[i];
    }
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.9g", m(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

inline std::string matrix_to_string(const Matrix& m, const std::vector<std::string>& ids) {
    std::ostringstream ss;
    write_matrix(ss, m, ids);
    return ss.str();
}

inline std::pair<Matrix, std::vector<std::string>> parse_matrix(std::istream& in) {
    std::string raw;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        out.push_back(cur);
        return out;
    };
    if (!std::getline(in, raw)) raise(errc::parse_error, "empty matrix file");
    std::vector<std::string> ids = split(raw);
    if (ids.empty() || (ids.size() == 1 && ids[0].empty()))
        raise(errc::parse_error, "matrix header holds no ids");
    const std::size_t n = ids.size();
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, raw))
            raise(errc::parse_error, "matrix ends after " + std::to_string(i) + " of " +
                                         std::to_string(n) + " rows");
        std::vector<std::string> cells = split(raw);
        if (cells.size() != n)
            raise(errc::parse_error, "line " + std::to_string(i + 2) + ": expected " +
                                         std::to_string(n) + " values, got " +
                                         std::to_string(cells.size()));
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = detail::parse_real(cells[j], static_cast<int>(i + 2));
    }
    return {std::move(m), std::move(ids)};
}

inline std::pair<Matrix, std::vector<std::string>> parse_matrix(const std::string& text) {
    std::istringstream ss(text);
    return parse_matrix(ss);
}

// --- labels files ------------------------------------------------------------
//
// Lines of `<id> <classToken>`, comments as in dataset files.

inline std::map<std::string, std::string> parse_labels(std::istream& in) {
    std::map<std::string, std::string> labels;
    for (const detail::Line& line : detail::tokenize(in)) {
        if (line.tokens.size() != 2)
            detail::parse_fail(line.number, "expected '<id> <classToken>'");
        labels[line.tokens[0]] = line.tokens[1];
    }
    return labels;
}

} // namespace relsim
