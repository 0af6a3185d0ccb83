#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "influence/error.hpp"

namespace influence {

enum class GraphKind { isn, ssn, artist };
enum class NodeKind { artwork, artist };

inline std::string_view to_string(GraphKind k) {
    switch (k) {
        case GraphKind::isn: return "ISN";
        case GraphKind::ssn: return "SSN";
        case GraphKind::artist: return "ARTIST";
    }
    return "?";
}

inline std::string_view to_string(NodeKind k) { return k == NodeKind::artwork ? "artwork" : "artist"; }

struct Node {
    std::string id;
    NodeKind kind = NodeKind::artwork;
    std::string artist_id;
    std::optional<int> year;  ///< artwork nodes only

    bool operator==(const Node&) const = default;
};

struct Edge {
    std::size_t src = 0;
    std::size_t dst = 0;
    double weight = 0.0;

    bool operator==(const Edge&) const = default;
};

/// Directed weighted graph over artworks or artists. Edges are kept in
/// canonical (src, dst) order and adjacency lists are built once.
///
/// The constructor enforces: node ids unique, no self edges, no duplicate
/// (src, dst), positive weights; for artwork graphs additionally
/// year(src) < year(dst), weight <= 1 and src/dst by different artists.
class InfluenceGraph {
public:
    InfluenceGraph() = default;

    InfluenceGraph(GraphKind kind, std::vector<Node> nodes, std::vector<Edge> edges)
        : kind_(kind), nodes_(std::move(nodes)), edges_(std::move(edges)) {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const Node& nd = nodes_[i];
            const NodeKind expected = kind_ == GraphKind::artist ? NodeKind::artist : NodeKind::artwork;
            if (nd.kind != expected)
                throw ValidationError("node '" + nd.id + "' has kind " + std::string(to_string(nd.kind)) +
                                      " in a " + std::string(to_string(kind_)) + " graph");
            if (expected == NodeKind::artwork && !nd.year)
                throw ValidationError("artwork node '" + nd.id + "' has no year");
            if (!index_.emplace(nd.id, i).second) throw ValidationError("duplicate node id '" + nd.id + "'");
        }
        std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return a.src != b.src ? a.src < b.src : a.dst < b.dst;
        });
        out_.resize(nodes_.size());
        in_.resize(nodes_.size());
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const Edge& ed = edges_[e];
            if (ed.src >= nodes_.size() || ed.dst >= nodes_.size())
                throw ValidationError("edge endpoint out of range");
            const std::string where = "edge " + nodes_[ed.src].id + " -> " + nodes_[ed.dst].id;
            if (ed.src == ed.dst) throw ValidationError(where + ": self edge");
            if (e > 0 && edges_[e - 1].src == ed.src && edges_[e - 1].dst == ed.dst)
                throw ValidationError(where + ": duplicate edge");
            if (!(ed.weight > 0.0)) throw ValidationError(where + ": weight must be positive");
            if (kind_ != GraphKind::artist) {
                if (ed.weight > 1.0) throw ValidationError(where + ": weight exceeds 1");
                if (!(*nodes_[ed.src].year < *nodes_[ed.dst].year))
                    throw ValidationError(where + ": edge must point from an older to a newer work");
                if (nodes_[ed.src].artist_id == nodes_[ed.dst].artist_id)
                    throw ValidationError(where + ": edge between works of the same artist");
            }
            out_[ed.src].push_back(ed.dst);
            in_[ed.dst].push_back(ed.src);
        }
        for (auto& v : in_) std::sort(v.begin(), v.end());
    }

    GraphKind kind() const noexcept { return kind_; }
    bool is_artwork_graph() const noexcept { return kind_ != GraphKind::artist; }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    std::size_t node_count() const noexcept { return nodes_.size(); }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    /// Out-neighbours in ascending index order.
    const std::vector<std::size_t>& successors(std::size_t v) const { return out_[v]; }
    /// In-neighbours in ascending index order.
    const std::vector<std::size_t>& predecessors(std::size_t v) const { return in_[v]; }

    std::optional<std::size_t> find(std::string_view id) const {
        const auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t require(std::string_view id) const {
        const auto i = find(id);
        if (!i) throw ValidationError("unknown node id '" + std::string(id) + "'");
        return *i;
    }

private:
    GraphKind kind_ = GraphKind::isn;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
};

/// Kahn's algorithm; true when the graph has no directed cycle.
inline bool is_acyclic(const InfluenceGraph& g) {
    std::vector<std::size_t> indeg(g.node_count(), 0);
    for (const auto& e : g.edges()) ++indeg[e.dst];
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < g.node_count(); ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::size_t visited = 0;
    while (!ready.empty()) {
        const std::size_t v = ready.back();
        ready.pop_back();
        ++visited;
        for (std::size_t w : g.successors(v))
            if (--indeg[w] == 0) ready.push_back(w);
    }
    return visited == g.node_count();
}

}  // namespace influence
