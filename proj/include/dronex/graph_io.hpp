#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dronex/graph.hpp"

namespace dronex {

// Parses the JSON map format:
//   {"nodes":[{"id":..,"x":..,"y":..},...],
//    "edges":[{"id":..,"from":..,"to":..,"length":..},...],
//    "base":int, "destinations":[int,...]}
// Edge bearings are derived from the endpoint geometry.
inline Graph load_map(const std::string& content) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("map parse error: ") + e.what());
    }
    try {
        std::vector<Node> nodes;
        for (const auto& jn : j.at("nodes")) {
            nodes.push_back({jn.at("id").get<NodeId>(), jn.at("x").get<double>(),
                             jn.at("y").get<double>()});
        }
        std::vector<DirectedEdge> edges;
        for (const auto& je : j.at("edges")) {
            DirectedEdge e;
            e.id = je.at("id").get<EdgeId>();
            e.from = je.at("from").get<NodeId>();
            e.to = je.at("to").get<NodeId>();
            e.length = je.at("length").get<double>();
            edges.push_back(e);
        }
        NodeId base = j.at("base").get<NodeId>();
        std::set<NodeId> dests;
        for (const auto& jd : j.at("destinations")) dests.insert(jd.get<NodeId>());
        for (auto& e : edges) {
            if (e.from >= 0 && static_cast<std::size_t>(e.from) < nodes.size() &&
                e.to >= 0 && static_cast<std::size_t>(e.to) < nodes.size()) {
                const Node& a = nodes[static_cast<std::size_t>(e.from)];
                const Node& b = nodes[static_cast<std::size_t>(e.to)];
                e.bearing = bearing_from_north(b.x - a.x, b.y - a.y);
            }
        }
        return Graph(std::move(nodes), std::move(edges), base, std::move(dests));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("map schema error: ") + e.what());
    }
}

namespace detail {
inline std::string fmt_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}
}  // namespace detail

// Serializes with 9 significant digits so identical graphs produce
// byte-identical files.
inline std::string save_map(const Graph& g) {
    std::ostringstream os;
    os << "{\n  \"nodes\": [";
    for (std::size_t i = 0; i < g.nodes().size(); ++i) {
        const Node& n = g.nodes()[i];
        if (i) os << ",";
        os << "\n    {\"id\": " << n.id << ", \"x\": " << detail::fmt_g9(n.x)
           << ", \"y\": " << detail::fmt_g9(n.y) << "}";
    }
    os << "\n  ],\n  \"edges\": [";
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        const DirectedEdge& e = g.edges()[i];
        if (i) os << ",";
        os << "\n    {\"id\": " << e.id << ", \"from\": " << e.from
           << ", \"to\": " << e.to << ", \"length\": " << detail::fmt_g9(e.length)
           << "}";
    }
    os << "\n  ],\n  \"base\": " << g.base() << ",\n  \"destinations\": [";
    bool first = true;
    for (NodeId d : g.destinations()) {
        if (!first) os << ", ";
        first = false;
        os << d;
    }
    os << "]\n}\n";
    return os.str();
}

inline Graph load_map_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open map file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_map(ss.str());
}

}  // namespace dronex
