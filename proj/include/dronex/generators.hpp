#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dronex/graph.hpp"
#include "dronex/rng.hpp"

namespace dronex {

namespace detail {

inline NodeId nearest_node(const std::vector<Node>& nodes, double cx, double cy) {
    NodeId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& n : nodes) {
        const double d = std::hypot(n.x - cx, n.y - cy);
        if (d < best_d) {
            best_d = d;
            best = n.id;
        }
    }
    return best;
}

inline std::set<NodeId> all_but(const std::vector<Node>& nodes, NodeId base) {
    std::set<NodeId> dests;
    for (const auto& n : nodes)
        if (n.id != base) dests.insert(n.id);
    return dests;
}

// Builds edges from a set of undirected node pairs, both directions,
// geometry-derived lengths/bearings, ids in (from, to) order.
inline std::vector<DirectedEdge> directed_pairs(const std::vector<Node>& nodes,
                                                const std::set<std::pair<NodeId, NodeId>>& und) {
    std::set<std::pair<NodeId, NodeId>> dir;
    for (const auto& [a, b] : und) {
        dir.insert({a, b});
        dir.insert({b, a});
    }
    std::vector<DirectedEdge> edges;
    edges.reserve(dir.size());
    for (const auto& [a, b] : dir) {
        edges.push_back(make_geometric_edge(static_cast<EdgeId>(edges.size()),
                                            nodes[static_cast<std::size_t>(a)],
                                            nodes[static_cast<std::size_t>(b)]));
    }
    return edges;
}

// Union-find used to bridge disconnected k-NN components.
struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(a)] = b;
        return true;
    }
};

}  // namespace detail

// n uniform node positions; each node connected to its k nearest neighbors,
// symmetrized. Disconnected components (possible for small k) are bridged by
// the shortest cross-component pair until the graph is connected.
inline Graph generate_random_map(int n, double width, double height, int k,
                                 std::uint64_t seed) {
    if (n < 1 || k < 1 || !(width > 0) || !(height > 0))
        throw std::invalid_argument("generate_random_map: bad arguments");
    Rng rng(seed);
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        nodes.push_back({i, rng.uniform(0, width), rng.uniform(0, height)});

    std::set<std::pair<NodeId, NodeId>> und;
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<double, NodeId>> others;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            others.push_back({std::hypot(nodes[static_cast<std::size_t>(j)].x - nodes[static_cast<std::size_t>(i)].x,
                                         nodes[static_cast<std::size_t>(j)].y - nodes[static_cast<std::size_t>(i)].y),
                              j});
        }
        std::sort(others.begin(), others.end());
        const int m = std::min<int>(k, static_cast<int>(others.size()));
        for (int t = 0; t < m; ++t) {
            NodeId j = others[static_cast<std::size_t>(t)].second;
            und.insert({std::min(i, j), std::max(i, j)});
        }
    }

    detail::DisjointSet ds(static_cast<std::size_t>(n));
    for (const auto& [a, b] : und) ds.unite(a, b);
    // bridge components with the globally shortest cross-component pair
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        std::pair<NodeId, NodeId> pick{-1, -1};
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (ds.find(i) == ds.find(j)) continue;
                const double d = std::hypot(nodes[static_cast<std::size_t>(j)].x - nodes[static_cast<std::size_t>(i)].x,
                                            nodes[static_cast<std::size_t>(j)].y - nodes[static_cast<std::size_t>(i)].y);
                if (d < best) {
                    best = d;
                    pick = {i, j};
                }
            }
        }
        if (pick.first < 0) break;
        und.insert(pick);
        ds.unite(pick.first, pick.second);
    }

    auto edges = detail::directed_pairs(nodes, und);
    NodeId base = detail::nearest_node(nodes, width / 2, height / 2);
    auto dests = detail::all_but(nodes, base);
    return Graph(std::move(nodes), std::move(edges), base, std::move(dests));
}

// Square mesh; every lattice adjacency yields two directed edges of edge_len.
inline Graph generate_grid_map(int rows, int cols, double edge_len) {
    if (rows < 1 || cols < 1 || !(edge_len > 0))
        throw std::invalid_argument("generate_grid_map: bad arguments");
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            nodes.push_back({r * cols + c, c * edge_len, r * edge_len});

    std::set<std::pair<NodeId, NodeId>> und;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            NodeId v = r * cols + c;
            if (c + 1 < cols) und.insert({v, v + 1});
            if (r + 1 < rows) und.insert({v, v + cols});
        }
    }
    auto edges = detail::directed_pairs(nodes, und);
    NodeId base = detail::nearest_node(nodes, (cols - 1) * edge_len / 2.0,
                                       (rows - 1) * edge_len / 2.0);
    auto dests = detail::all_but(nodes, base);
    return Graph(std::move(nodes), std::move(edges), base, std::move(dests));
}

}  // namespace dronex
