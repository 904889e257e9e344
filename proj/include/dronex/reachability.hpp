#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "dronex/belief.hpp"
#include "dronex/energy.hpp"
#include "dronex/gaussian.hpp"
#include "dronex/graph.hpp"
#include "dronex/shortest_path.hpp"

namespace dronex {

struct SuccessProbability {
    double value = 0;
    double mu_total = 0;
    double sigma2_total = 0;
    double known_cost = 0;
    double slack = 0;  // budget minus known cost
};

// Success probability of a Gaussian total against a budget. sigma = 0 is the
// degenerate point mass, handled as a step.
inline SuccessProbability success_from_moments(double budget, double known_cost,
                                               double mu, double sigma2) {
    SuccessProbability p;
    p.mu_total = mu;
    p.sigma2_total = sigma2;
    p.known_cost = known_cost;
    p.slack = budget - known_cost;
    if (sigma2 > 0) {
        p.value = normal_cdf((p.slack - mu) / std::sqrt(sigma2));
    } else {
        p.value = (mu <= p.slack) ? 1.0 : 0.0;
    }
    return p;
}

struct PathMoments {
    double known_cost = 0;
    double mu = 0;
    double sigma2 = 0;
};

inline PathMoments path_moments(const EnergyBelief& belief, const Path& path) {
    PathMoments m;
    for (EdgeId e : path) {
        if (belief.is_known(e)) {
            m.known_cost += belief.known_value(e);
        } else {
            m.mu += belief.belief(e).mu;
            m.sigma2 += belief.belief(e).sigma2;
        }
    }
    return m;
}

inline SuccessProbability path_success_probability(const EnergyBelief& belief,
                                                   const Path& path, double budget) {
    const PathMoments m = path_moments(belief, path);
    return success_from_moments(budget, m.known_cost, m.mu, m.sigma2);
}

// Outbound leg priced under the payload-l model, return leg under payload 0.
inline SuccessProbability trip_success_probability(const EnergyBelief& belief_l,
                                                   const EnergyBelief& belief_0,
                                                   const Trip& trip, double budget) {
    const PathMoments a = path_moments(belief_l, trip.outbound);
    const PathMoments b = path_moments(belief_0, trip.inbound);
    return success_from_moments(budget, a.known_cost + b.known_cost, a.mu + b.mu,
                                a.sigma2 + b.sigma2);
}

inline std::vector<double> mean_weights(const Graph& g, const EnergyBelief& belief) {
    std::vector<double> w(g.edge_count());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = belief.mean(static_cast<EdgeId>(i));
    return w;
}

// The trip the strategies actually fly: mean-weight shortest paths out and back.
inline std::optional<Trip> surrogate_trip(const Graph& g, const EnergyBelief& belief_l,
                                          const EnergyBelief& belief_0, NodeId dest) {
    const auto out = shortest_path(g, mean_weights(g, belief_l), g.base(), dest);
    if (!out) return std::nullopt;
    const auto ret = shortest_path(g, mean_weights(g, belief_0), dest, g.base());
    if (!ret) return std::nullopt;
    return Trip{*out, *ret};
}

enum class ReachMode { Exact, Surrogate };

namespace detail {

inline void enumerate_simple_paths(const Graph& g, NodeId at, NodeId dst,
                                   std::vector<char>& used, Path& current,
                                   std::vector<Path>& out) {
    if (at == dst) {
        out.push_back(current);
        return;
    }
    for (EdgeId e : g.out_edges(at)) {
        const NodeId to = g.edge(e).to;
        if (used[static_cast<std::size_t>(to)]) continue;
        used[static_cast<std::size_t>(to)] = 1;
        current.push_back(e);
        enumerate_simple_paths(g, to, dst, used, current, out);
        current.pop_back();
        used[static_cast<std::size_t>(to)] = 0;
    }
}

inline std::vector<Path> all_simple_paths(const Graph& g, NodeId src, NodeId dst) {
    std::vector<Path> out;
    std::vector<char> used(g.node_count(), 0);
    used[static_cast<std::size_t>(src)] = 1;
    Path current;
    enumerate_simple_paths(g, src, dst, used, current, out);
    return out;
}

}  // namespace detail

struct ReachResult {
    SuccessProbability prob;
    std::optional<Trip> trip;
};

// Maximum probability of reaching dest and returning. Exact mode enumerates
// every simple-trip combination and is restricted to small graphs; surrogate
// mode scores the mean-shortest-path trip.
inline ReachResult max_reach_probability(const EnergyBelief& belief_l,
                                         const EnergyBelief& belief_0, const Graph& g,
                                         NodeId dest, double budget, ReachMode mode) {
    ReachResult r;
    if (mode == ReachMode::Surrogate) {
        auto trip = surrogate_trip(g, belief_l, belief_0, dest);
        if (!trip) return r;
        r.prob = trip_success_probability(belief_l, belief_0, *trip, budget);
        r.trip = std::move(trip);
        return r;
    }
    if (g.node_count() > 10)
        throw std::invalid_argument("exact reach mode limited to graphs with <= 10 nodes");
    const auto outs = detail::all_simple_paths(g, g.base(), dest);
    const auto rets = detail::all_simple_paths(g, dest, g.base());
    bool found = false;
    for (const auto& o : outs) {
        for (const auto& b : rets) {
            const Trip t{o, b};
            const auto p = trip_success_probability(belief_l, belief_0, t, budget);
            if (!found || p.value > r.prob.value) {
                found = true;
                r.prob = p;
                r.trip = t;
            }
        }
    }
    if (!found) r.trip.reset();
    return r;
}

struct ReachableSet {
    std::set<NodeId> members;
    std::map<NodeId, double> prob;  // every destination with a structurally valid trip
};

// Destinations whose best-trip success probability clears phi. Uses the two
// shortest-path trees, with moments accumulated down each tree, so one
// evaluation costs two Dijkstra runs.
inline ReachableSet probabilistic_reachable_set(const EnergyBelief& belief_l,
                                                const EnergyBelief& belief_0,
                                                const Graph& g, double budget,
                                                double phi,
                                                std::optional<ReachMode> mode = {}) {
    ReachableSet rs;
    const ReachMode m = mode.value_or(g.node_count() <= 10 ? ReachMode::Exact
                                                           : ReachMode::Surrogate);
    if (m == ReachMode::Exact) {
        for (NodeId d : g.destinations()) {
            const auto r = max_reach_probability(belief_l, belief_0, g, d, budget, m);
            if (!r.trip) continue;
            rs.prob[d] = r.prob.value;
            if (r.prob.value >= phi) rs.members.insert(d);
        }
        return rs;
    }
    const SpTree out = sp_tree(g, mean_weights(g, belief_l), g.base(), false);
    const SpTree ret = sp_tree(g, mean_weights(g, belief_0), g.base(), true);

    // moments of the tree path per node, accumulated through parent pointers
    auto accumulate = [&](const SpTree& t, const EnergyBelief& belief) {
        std::vector<PathMoments> m(g.node_count());
        std::vector<char> done(g.node_count(), 0);
        done[static_cast<std::size_t>(t.root)] = 1;
        std::vector<NodeId> chain;
        for (NodeId v = 0; v < static_cast<NodeId>(g.node_count()); ++v) {
            if (done[static_cast<std::size_t>(v)] || t.dist[static_cast<std::size_t>(v)] == kInf)
                continue;
            chain.clear();
            NodeId at = v;
            while (!done[static_cast<std::size_t>(at)]) {
                chain.push_back(at);
                const EdgeId e = t.parent_edge[static_cast<std::size_t>(at)];
                at = t.reverse ? g.edge(e).to : g.edge(e).from;
            }
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                const EdgeId e = t.parent_edge[static_cast<std::size_t>(*it)];
                const NodeId par = t.reverse ? g.edge(e).to : g.edge(e).from;
                PathMoments pm = m[static_cast<std::size_t>(par)];
                if (belief.is_known(e)) {
                    pm.known_cost += belief.known_value(e);
                } else {
                    pm.mu += belief.belief(e).mu;
                    pm.sigma2 += belief.belief(e).sigma2;
                }
                m[static_cast<std::size_t>(*it)] = pm;
                done[static_cast<std::size_t>(*it)] = 1;
            }
        }
        return m;
    };
    const auto mo = accumulate(out, belief_l);
    const auto mr = accumulate(ret, belief_0);

    for (NodeId d : g.destinations()) {
        const std::size_t i = static_cast<std::size_t>(d);
        if (out.dist[i] == kInf || ret.dist[i] == kInf) continue;
        const auto p = success_from_moments(budget, mo[i].known_cost + mr[i].known_cost,
                                            mo[i].mu + mr[i].mu,
                                            mo[i].sigma2 + mr[i].sigma2);
        rs.prob[d] = p.value;
        if (p.value >= phi) rs.members.insert(d);
    }
    return rs;
}

// Ground-truth reachability: cheapest true round trip within the budget.
inline std::set<NodeId> true_reachable_set(const Graph& g, const PhysicsConstants& k,
                                           const Configuration& cfg, double budget) {
    const auto cost = round_trip_costs(g, cfg, k);
    std::set<NodeId> out;
    for (NodeId d : g.destinations())
        if (cost[static_cast<std::size_t>(d)] <= budget) out.insert(d);
    return out;
}

}  // namespace dronex
