#pragma once

// GraphML, DOT and CSV edge-list export, plus edge-list import.

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "influence/csv.hpp"
#include "influence/error.hpp"
#include "influence/graph.hpp"

namespace influence {

/// Significant digits used for every real number the exporters print.
inline constexpr int kExportDigits = 9;

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

inline void write_graphml(std::ostream& out, const InfluenceGraph& g) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" "
           "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
           "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
           "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
        << "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
        << "  <key id=\"artist_id\" for=\"node\" attr.name=\"artist_id\" attr.type=\"string\"/>\n"
        << "  <key id=\"year\" for=\"node\" attr.name=\"year\" attr.type=\"int\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <graph id=\"" << to_string(g.kind()) << "\" edgedefault=\"directed\">\n";
    for (const auto& nd : g.nodes()) {
        out << "    <node id=\"" << detail::xml_escape(nd.id) << "\">"
            << "<data key=\"kind\">" << to_string(nd.kind) << "</data>"
            << "<data key=\"artist_id\">" << detail::xml_escape(nd.artist_id) << "</data>";
        if (nd.year) out << "<data key=\"year\">" << *nd.year << "</data>";
        out << "</node>\n";
    }
    for (const auto& e : g.edges()) {
        out << "    <edge source=\"" << detail::xml_escape(g.node(e.src).id) << "\" target=\""
            << detail::xml_escape(g.node(e.dst).id) << "\"><data key=\"weight\">"
            << csv::format_real(e.weight, kExportDigits) << "</data></edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

inline void write_dot(std::ostream& out, const InfluenceGraph& g) {
    out << "digraph " << to_string(g.kind()) << " {\n";
    for (const auto& nd : g.nodes()) {
        out << "  " << detail::dot_quote(nd.id) << " [kind=" << to_string(nd.kind)
            << ", artist_id=" << detail::dot_quote(nd.artist_id);
        if (nd.year) out << ", year=" << *nd.year;
        out << "];\n";
    }
    for (const auto& e : g.edges()) {
        const std::string w = csv::format_real(e.weight, kExportDigits);
        out << "  " << detail::dot_quote(g.node(e.src).id) << " -> " << detail::dot_quote(g.node(e.dst).id)
            << " [weight=" << w << ", label=\"" << w << "\"];\n";
    }
    out << "}\n";
}

/// `src,dst,weight` in canonical edge order.
inline void write_edge_csv(std::ostream& out, const InfluenceGraph& g) {
    out << "src,dst,weight\n";
    for (const auto& e : g.edges())
        out << csv::escape(g.node(e.src).id) << ',' << csv::escape(g.node(e.dst).id) << ','
            << csv::format_real(e.weight, kExportDigits) << '\n';
}

/// Rebuilds a graph from an edge list over a known node set. Every edge is
/// checked against the graph invariants.
inline InfluenceGraph read_edge_csv(std::istream& in, GraphKind kind, std::vector<Node> nodes,
                                    const std::string& name = "edge list") {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].id, i);

    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row) || row.fields != std::vector<std::string>{"src", "dst", "weight"})
        throw ValidationError(name + ": expected header src,dst,weight");
    std::vector<Edge> edges;
    while (reader.next(row)) {
        const std::string where = name + " row " + std::to_string(row.line);
        if (row.fields.size() != 3) throw ValidationError(where + ": expected 3 fields");
        const auto s = index.find(row.fields[0]);
        const auto d = index.find(row.fields[1]);
        if (s == index.end()) throw ValidationError(where + ": unknown node '" + row.fields[0] + "'");
        if (d == index.end()) throw ValidationError(where + ": unknown node '" + row.fields[1] + "'");
        const auto w = csv::parse_real(row.fields[2]);
        if (!w || !std::isfinite(*w)) throw ValidationError(where + ": bad weight '" + row.fields[2] + "'");
        edges.push_back({s->second, d->second, *w});
    }
    try {
        return InfluenceGraph(kind, std::move(nodes), std::move(edges));
    } catch (const ValidationError& e) {
        throw ValidationError(name + ": " + e.what());
    }
}

}  // namespace influence
