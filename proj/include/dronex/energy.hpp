#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "dronex/graph.hpp"
#include "dronex/shortest_path.hpp"

namespace dronex {

struct Configuration {
    double payload = 0;         // kg
    double wind_speed = 0;      // m/s
    double wind_direction = 0;  // radians from north, [0, 2*pi)
};

struct PhysicsConstants {
    double a = 1e-4;   // overall scale
    double b = 1.0;    // airspeed-squared coefficient
    double c = 25.0;   // constant power term
    double d = 1.0;    // thrust-angle coefficient
    double e = 0.0;    // additive offset
    double m0 = 1.5;   // drone mass, kg
    double v_max = 15.0;  // maximum velocity, m/s
};

struct Budget {
    double value = 0;
};

struct DegenerateGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Physical edge cost. The wind angle is taken relative to the edge bearing,
// which is what makes opposite directions of the same segment cost
// differently. Deterministic: the same (edge, config) always yields the same
// value.
inline double true_edge_energy(const DirectedEdge& edge, const Configuration& cfg,
                               const PhysicsConstants& k) {
    const double rel = normalize_angle(cfg.wind_direction - edge.bearing);
    const double cross = cfg.wind_speed * std::sin(rel);
    const double along = k.v_max - cfg.wind_speed * std::cos(rel);
    const double va2 = cross * cross + along * along;
    const double va = std::sqrt(va2);
    const double sin_beta = va > 0 ? cross / va : 0.0;
    const double cos2 = 1.0 - sin_beta * sin_beta;
    if (!(cos2 > 1e-12))
        throw DegenerateGeometryError("crosswind cancels airspeed along edge");
    const double cos_beta = std::sqrt(cos2);
    return k.a * (k.m0 + cfg.payload) * (va2 * k.b + k.c) * edge.length * k.d / cos_beta +
           k.e;
}

// True per-edge weights under a configuration, for shortest-path queries.
inline std::vector<double> true_weights(const Graph& g, const Configuration& cfg,
                                        const PhysicsConstants& k) {
    std::vector<double> w(g.edge_count());
    for (const auto& e : g.edges()) w[static_cast<std::size_t>(e.id)] = true_edge_energy(e, cfg, k);
    return w;
}

// Cheapest round-trip cost per destination: outbound under payload l, return
// under payload 0. Infinite when no round trip exists.
inline std::vector<double> round_trip_costs(const Graph& g, const Configuration& cfg,
                                            const PhysicsConstants& k) {
    Configuration back = cfg;
    back.payload = 0;
    const auto w_out = true_weights(g, cfg, k);
    const auto w_ret = true_weights(g, back, k);
    const SpTree out = sp_tree(g, w_out, g.base(), false);
    const SpTree ret = sp_tree(g, w_ret, g.base(), true);
    std::vector<double> cost(g.node_count(), kInf);
    for (NodeId v = 0; v < static_cast<NodeId>(g.node_count()); ++v)
        cost[static_cast<std::size_t>(v)] =
            out.dist[static_cast<std::size_t>(v)] + ret.dist[static_cast<std::size_t>(v)];
    return cost;
}

// Smallest budget making at least target_fraction of the destinations
// reachable. The reachable fraction steps exactly at the sorted round-trip
// costs, so the search reduces to an order statistic.
inline Budget choose_budget(const Graph& g, const PhysicsConstants& k,
                            const Configuration& cfg, double target_fraction) {
    if (!(target_fraction > 0) || !(target_fraction <= 1))
        throw std::invalid_argument("target_fraction must be in (0, 1]");
    const auto cost = round_trip_costs(g, cfg, k);
    std::vector<double> finite;
    for (NodeId d : g.destinations()) {
        const double c = cost[static_cast<std::size_t>(d)];
        if (std::isfinite(c)) finite.push_back(c);
    }
    if (finite.empty()) throw std::invalid_argument("no destination has a round trip");
    std::sort(finite.begin(), finite.end());
    const auto total = static_cast<double>(g.destinations().size());
    std::size_t need = static_cast<std::size_t>(std::ceil(target_fraction * total - 1e-12));
    need = std::clamp<std::size_t>(need, 1, finite.size());
    return Budget{finite[need - 1]};
}

}  // namespace dronex
