#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace dronex {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using NodeId = int;
using EdgeId = int;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// normalizes any angle into [0, 2*pi)
inline double normalize_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;  // guards fmod rounding at the seam
    return a;
}

struct Node {
    NodeId id = 0;
    double x = 0;  // meters
    double y = 0;  // meters
};

struct DirectedEdge {
    EdgeId id = 0;
    NodeId from = 0;
    NodeId to = 0;
    double length = 0;   // meters
    double bearing = 0;  // radians from north, in [0, 2*pi)
};

// Bearing from north: north is +y, east is +x.
inline double bearing_from_north(double dx, double dy) {
    if (dx == 0 && dy == 0) return 0.0;
    return normalize_angle(std::atan2(dx, dy));
}

// A path is a sequence of edge ids forming a walk; empty means "stay put".
using Path = std::vector<EdgeId>;

struct Trip {
    Path outbound;  // base -> dest
    Path inbound;   // dest -> base
};

class Graph {
public:
    Graph(std::vector<Node> nodes, std::vector<DirectedEdge> edges, NodeId base,
          std::set<NodeId> destinations)
        : nodes_(std::move(nodes)),
          edges_(std::move(edges)),
          base_(base),
          destinations_(std::move(destinations)) {
        validate();
        build_adjacency();
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<DirectedEdge>& edges() const { return edges_; }
    NodeId base() const { return base_; }
    const std::set<NodeId>& destinations() const { return destinations_; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const DirectedEdge& edge(EdgeId id) const { return edges_[static_cast<std::size_t>(id)]; }

    // out-edges, sorted by edge id
    const std::vector<EdgeId>& out_edges(NodeId v) const {
        return out_[static_cast<std::size_t>(v)];
    }
    const std::vector<EdgeId>& in_edges(NodeId v) const {
        return in_[static_cast<std::size_t>(v)];
    }

    double midpoint_x(EdgeId e) const {
        const auto& ed = edge(e);
        return 0.5 * (node(ed.from).x + node(ed.to).x);
    }
    double midpoint_y(EdgeId e) const {
        const auto& ed = edge(e);
        return 0.5 * (node(ed.from).y + node(ed.to).y);
    }

    double midpoint_distance(EdgeId a, EdgeId b) const {
        const double dx = midpoint_x(a) - midpoint_x(b);
        const double dy = midpoint_y(a) - midpoint_y(b);
        return std::hypot(dx, dy);
    }

    // Checks that `path` is a walk from `src` to `dst` (empty ok iff src == dst).
    bool is_walk(const Path& path, NodeId src, NodeId dst) const {
        NodeId at = src;
        for (EdgeId e : path) {
            if (e < 0 || static_cast<std::size_t>(e) >= edges_.size()) return false;
            if (edge(e).from != at) return false;
            at = edge(e).to;
        }
        return at == dst;
    }

    bool is_trip(const Trip& t, NodeId dest) const {
        return is_walk(t.outbound, base_, dest) && is_walk(t.inbound, dest, base_);
    }

private:
    void validate() const {
        if (nodes_.empty()) throw ValidationError("graph has no nodes");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].id != static_cast<NodeId>(i))
                throw ValidationError("node ids must be contiguous from 0");
        }
        std::unordered_set<std::uint64_t> seen_pairs;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const auto& e = edges_[i];
            if (e.id != static_cast<EdgeId>(i))
                throw ValidationError("edge ids must be contiguous from 0");
            if (e.from < 0 || static_cast<std::size_t>(e.from) >= nodes_.size() ||
                e.to < 0 || static_cast<std::size_t>(e.to) >= nodes_.size())
                throw ValidationError("edge endpoint out of range");
            if (e.from == e.to) throw ValidationError("self-loop edge");
            if (!(e.length > 0)) throw ValidationError("edge length must be positive");
            std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.from)) << 32) |
                                static_cast<std::uint32_t>(e.to);
            if (!seen_pairs.insert(key).second)
                throw ValidationError("duplicate edge between node pair");
        }
        if (base_ < 0 || static_cast<std::size_t>(base_) >= nodes_.size())
            throw ValidationError("missing or invalid base node");
        for (NodeId d : destinations_) {
            if (d < 0 || static_cast<std::size_t>(d) >= nodes_.size())
                throw ValidationError("destination out of range");
            if (d == base_) throw ValidationError("base cannot be a destination");
        }
        check_connected();
    }

    void check_connected() const {
        if (nodes_.size() <= 1) return;
        std::vector<std::vector<NodeId>> und(nodes_.size());
        for (const auto& e : edges_) {
            und[static_cast<std::size_t>(e.from)].push_back(e.to);
            und[static_cast<std::size_t>(e.to)].push_back(e.from);
        }
        std::vector<char> vis(nodes_.size(), 0);
        std::vector<NodeId> stack{0};
        vis[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            for (NodeId w : und[static_cast<std::size_t>(v)]) {
                if (!vis[static_cast<std::size_t>(w)]) {
                    vis[static_cast<std::size_t>(w)] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        if (count != nodes_.size())
            throw ValidationError("graph is not connected (ignoring edge directions)");
    }

    void build_adjacency() {
        out_.assign(nodes_.size(), {});
        in_.assign(nodes_.size(), {});
        for (const auto& e : edges_) {
            out_[static_cast<std::size_t>(e.from)].push_back(e.id);
            in_[static_cast<std::size_t>(e.to)].push_back(e.id);
        }
        // edges are id-ordered already, so adjacency lists come out sorted
    }

    std::vector<Node> nodes_;
    std::vector<DirectedEdge> edges_;
    NodeId base_;
    std::set<NodeId> destinations_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<std::vector<EdgeId>> in_;
};

// Fills in length (Euclidean) and bearing from the endpoint geometry.
inline DirectedEdge make_geometric_edge(EdgeId id, const Node& a, const Node& b) {
    DirectedEdge e;
    e.id = id;
    e.from = a.id;
    e.to = b.id;
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    e.length = std::hypot(dx, dy);
    e.bearing = bearing_from_north(dx, dy);
    return e;
}

}  // namespace dronex
