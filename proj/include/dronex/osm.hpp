#pragma once

#include <cmath>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "dronex/graph.hpp"

namespace dronex {

struct LatLonBox {
    double min_lat = 0, min_lon = 0, max_lat = 0, max_lon = 0;
};

// Imports the standard XML node/way road-extract form. Nodes are projected to
// local meters with an equirectangular projection about the bbox center, ways
// are split into directed edge pairs, duplicate parallel edges collapse to the
// shorter, and only the largest weakly-connected component is kept.
inline Graph import_road_network(const std::string& xml, const LatLonBox& bbox) {
    boost::property_tree::ptree pt;
    try {
        std::istringstream in(xml);
        boost::property_tree::read_xml(in, pt);
    } catch (const std::exception& e) {
        throw ParseError(std::string("road extract parse error: ") + e.what());
    }
    const auto osm = pt.get_child_optional("osm");
    if (!osm) throw ParseError("road extract has no <osm> root");

    constexpr double kEarthRadius = 6371000.0;
    const double lat0 = 0.5 * (bbox.min_lat + bbox.max_lat);
    const double lon0 = 0.5 * (bbox.min_lon + bbox.max_lon);
    const double deg = std::numbers::pi / 180.0;
    const double cos_lat0 = std::cos(lat0 * deg);

    std::map<long long, Node> raw_nodes;  // osm id -> projected node (id unset)
    for (const auto& [tag, child] : *osm) {
        if (tag != "node") continue;
        const auto attrs = child.get_child_optional("<xmlattr>");
        if (!attrs) continue;
        const long long id = attrs->get<long long>("id", -1);
        const double lat = attrs->get<double>("lat", std::nan(""));
        const double lon = attrs->get<double>("lon", std::nan(""));
        if (id < 0 || std::isnan(lat) || std::isnan(lon)) continue;
        if (lat < bbox.min_lat || lat > bbox.max_lat || lon < bbox.min_lon ||
            lon > bbox.max_lon)
            continue;
        Node n;
        n.x = (lon - lon0) * deg * cos_lat0 * kEarthRadius;
        n.y = (lat - lat0) * deg * kEarthRadius;
        raw_nodes[id] = n;
    }

    // undirected segment list; parallel duplicates keep the shorter geometry
    std::map<std::pair<long long, long long>, char> segments;
    for (const auto& [tag, child] : *osm) {
        if (tag != "way") continue;
        std::vector<long long> refs;
        for (const auto& [wtag, wchild] : child) {
            if (wtag != "nd") continue;
            const long long ref = wchild.get<long long>("<xmlattr>.ref", -1);
            if (ref >= 0) refs.push_back(ref);
        }
        for (std::size_t i = 0; i + 1 < refs.size(); ++i) {
            long long a = refs[i], b = refs[i + 1];
            if (a == b) continue;
            if (!raw_nodes.count(a) || !raw_nodes.count(b)) continue;
            segments[{std::min(a, b), std::max(a, b)}] = 1;
        }
    }
    if (raw_nodes.empty() || segments.empty())
        throw ParseError("road extract empty after bbox filtering");

    // weakly-connected components over the raw segment graph
    std::map<long long, int> comp;
    int ncomp = 0;
    std::map<long long, std::vector<long long>> adj;
    for (const auto& [seg, unused] : segments) {
        adj[seg.first].push_back(seg.second);
        adj[seg.second].push_back(seg.first);
    }
    for (const auto& [id, nbrs] : adj) {
        if (comp.count(id)) continue;
        const int c = ncomp++;
        std::vector<long long> stack{id};
        comp[id] = c;
        while (!stack.empty()) {
            long long v = stack.back();
            stack.pop_back();
            for (long long w : adj[v]) {
                if (!comp.count(w)) {
                    comp[w] = c;
                    stack.push_back(w);
                }
            }
        }
    }
    std::vector<int> comp_size(static_cast<std::size_t>(ncomp), 0);
    for (const auto& [id, c] : comp) comp_size[static_cast<std::size_t>(c)]++;
    int keep = 0;
    for (int c = 1; c < ncomp; ++c)
        if (comp_size[static_cast<std::size_t>(c)] > comp_size[static_cast<std::size_t>(keep)]) keep = c;
    if (ncomp > 1)
        std::cerr << "import_road_network: dropping " << (ncomp - 1)
                  << " smaller component(s)\n";

    std::map<long long, NodeId> remap;
    std::vector<Node> nodes;
    for (const auto& [id, c] : comp) {
        if (c != keep) continue;
        Node n = raw_nodes[id];
        n.id = static_cast<NodeId>(nodes.size());
        remap[id] = n.id;
        nodes.push_back(n);
    }

    std::set<std::pair<NodeId, NodeId>> dir;
    for (const auto& [seg, unused] : segments) {
        auto a = remap.find(seg.first);
        auto b = remap.find(seg.second);
        if (a == remap.end() || b == remap.end()) continue;
        dir.insert({a->second, b->second});
        dir.insert({b->second, a->second});
    }
    std::vector<DirectedEdge> edges;
    for (const auto& [a, b] : dir) {
        edges.push_back(make_geometric_edge(static_cast<EdgeId>(edges.size()),
                                            nodes[static_cast<std::size_t>(a)],
                                            nodes[static_cast<std::size_t>(b)]));
    }

    NodeId base = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& n : nodes) {
        const double d = std::hypot(n.x, n.y);  // bbox center projects to origin
        if (d < best) {
            best = d;
            base = n.id;
        }
    }
    std::set<NodeId> dests;
    for (const auto& n : nodes)
        if (n.id != base) dests.insert(n.id);
    return Graph(std::move(nodes), std::move(edges), base, std::move(dests));
}

}  // namespace dronex
