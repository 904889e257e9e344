#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "dronex/graph.hpp"

namespace dronex {

struct NegativeWeightError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

inline void check_weights(const Graph& g, std::span<const double> w) {
    if (w.size() != g.edge_count())
        throw std::invalid_argument("weight vector size mismatch");
    for (double x : w)
        if (!(x >= 0) || !std::isfinite(x))
            throw NegativeWeightError("edge weights must be nonnegative and finite");
}

// Single-source shortest-path tree. parent_edge[v] is the tree edge into v
// (forward) or out of v (reverse); -1 at the root and unreachable nodes.
struct SpTree {
    NodeId root = 0;
    bool reverse = false;
    std::vector<double> dist;
    std::vector<EdgeId> parent_edge;
};

// Dijkstra from `root`. With reverse=true, dist[v] is the cost from v TO root
// and the tree follows in-edges. Equal-distance relaxations keep the smaller
// edge id, so trees are deterministic.
inline SpTree sp_tree(const Graph& g, std::span<const double> w, NodeId root,
                      bool reverse = false) {
    check_weights(g, w);
    SpTree t;
    t.root = root;
    t.reverse = reverse;
    t.dist.assign(g.node_count(), kInf);
    t.parent_edge.assign(g.node_count(), -1);
    t.dist[static_cast<std::size_t>(root)] = 0;

    using QItem = std::pair<double, NodeId>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
    pq.push({0.0, root});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > t.dist[static_cast<std::size_t>(v)]) continue;
        const auto& adj = reverse ? g.in_edges(v) : g.out_edges(v);
        for (EdgeId e : adj) {
            const NodeId u = reverse ? g.edge(e).from : g.edge(e).to;
            const double nd = d + w[static_cast<std::size_t>(e)];
            double& du = t.dist[static_cast<std::size_t>(u)];
            if (nd < du || (nd == du && t.parent_edge[static_cast<std::size_t>(u)] > e)) {
                if (nd < du) pq.push({nd, u});
                du = nd;
                t.parent_edge[static_cast<std::size_t>(u)] = e;
            }
        }
    }
    return t;
}

// Path root->v for a forward tree, v->root for a reverse tree; nullopt when
// unreachable.
inline std::optional<Path> tree_path(const Graph& g, const SpTree& t, NodeId v) {
    if (t.dist[static_cast<std::size_t>(v)] == kInf) return std::nullopt;
    Path p;
    NodeId at = v;
    while (at != t.root) {
        if (p.size() > g.node_count())
            throw std::runtime_error("shortest-path tree contains a cycle");
        const EdgeId e = t.parent_edge[static_cast<std::size_t>(at)];
        p.push_back(e);
        at = t.reverse ? g.edge(e).to : g.edge(e).from;
    }
    if (!t.reverse) std::reverse(p.begin(), p.end());
    return p;
}

// Minimal-weight path src->dst; among equal-cost paths returns the one with
// the lexicographically smallest edge-id sequence. The lexicographic pick is
// extracted greedily from the shortest-path DAG.
inline std::optional<Path> shortest_path(const Graph& g, std::span<const double> w,
                                         NodeId src, NodeId dst) {
    if (src == dst) return Path{};
    SpTree t = sp_tree(g, w, src, false);
    if (t.dist[static_cast<std::size_t>(dst)] == kInf) return std::nullopt;

    // nodes that can still reach dst through DAG edges
    std::vector<char> reaches(g.node_count(), 0);
    reaches[static_cast<std::size_t>(dst)] = 1;
    std::vector<NodeId> stack{dst};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (EdgeId e : g.in_edges(v)) {
            const NodeId u = g.edge(e).from;
            if (reaches[static_cast<std::size_t>(u)]) continue;
            if (t.dist[static_cast<std::size_t>(u)] + w[static_cast<std::size_t>(e)] ==
                t.dist[static_cast<std::size_t>(v)]) {
                reaches[static_cast<std::size_t>(u)] = 1;
                stack.push_back(u);
            }
        }
    }

    Path p;
    std::vector<char> visited(g.node_count(), 0);
    NodeId at = src;
    visited[static_cast<std::size_t>(at)] = 1;
    while (at != dst) {
        EdgeId pick = -1;
        for (EdgeId e : g.out_edges(at)) {  // id-sorted
            const NodeId u = g.edge(e).to;
            if (t.dist[static_cast<std::size_t>(at)] + w[static_cast<std::size_t>(e)] !=
                t.dist[static_cast<std::size_t>(u)])
                continue;
            if (!reaches[static_cast<std::size_t>(u)]) continue;
            if (visited[static_cast<std::size_t>(u)] && u != dst) continue;
            pick = e;
            break;
        }
        if (pick < 0) {
            // zero-weight cycle dead end; fall back to the tree path
            return tree_path(g, t, dst);
        }
        p.push_back(pick);
        at = g.edge(pick).to;
        visited[static_cast<std::size_t>(at)] = 1;
    }
    return p;
}

inline double path_cost(std::span<const double> w, const Path& p) {
    double c = 0;
    for (EdgeId e : p) c += w[static_cast<std::size_t>(e)];
    return c;
}

}  // namespace dronex
