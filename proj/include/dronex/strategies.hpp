#pragma once

#include <optional>
#include <queue>
#include <vector>

#include "dronex/belief.hpp"
#include "dronex/reachability.hpp"
#include "dronex/rng.hpp"

namespace dronex {

struct Request {
    NodeId dest = 0;
    Configuration config;  // payload plus the wind sampled for this request
};

struct Decision {
    bool accepted = false;
    Trip trip;
    bool expanded = false;  // frontier expansion taken
};

struct StrategyParams {
    double phi = 0.95;
    double alpha = 0.0;  // budget inflation used only in accept checks
    double beta = 0.05;  // probability of forcing frontier expansion
};

// Accepts iff the mean-shortest-path trip clears phi at (1+alpha)*B.
inline Decision plan_shortest_path(const EnergyBelief& belief_l,
                                   const EnergyBelief& belief_0, const Graph& g,
                                   const Request& req, double budget,
                                   const StrategyParams& p) {
    Decision d;
    auto trip = surrogate_trip(g, belief_l, belief_0, req.dest);
    if (!trip) return d;
    const auto prob =
        trip_success_probability(belief_l, belief_0, *trip, (1 + p.alpha) * budget);
    if (prob.value >= p.phi) {
        d.accepted = true;
        d.trip = std::move(*trip);
    }
    return d;
}

// Frontier strategy. With probability beta (or whenever the straight trip
// fails the check) it probes a random neighbor pair of the destination: fly
// to v_a, hop v_a -> dest -> v_b, return from v_b. The probability check for
// the expansion deliberately ignores the two hop edges.
inline Decision plan_frontier(const EnergyBelief& belief_l, const EnergyBelief& belief_0,
                              const Graph& g, const Request& req, double budget,
                              const StrategyParams& p, Rng& rng) {
    Decision d;
    const double inflated = (1 + p.alpha) * budget;
    const double r = rng.uniform();
    auto straight = surrogate_trip(g, belief_l, belief_0, req.dest);
    if (r >= p.beta && straight) {
        const auto prob = trip_success_probability(belief_l, belief_0, *straight, inflated);
        if (prob.value >= p.phi) {
            d.accepted = true;
            d.trip = std::move(*straight);
            return d;
        }
    }
    // frontier expansion
    const auto& in = g.in_edges(req.dest);
    const auto& out = g.out_edges(req.dest);
    if (in.empty() || out.empty()) return d;
    const EdgeId e_in = in[rng.uniform_index(in.size())];
    const EdgeId e_out = out[rng.uniform_index(out.size())];
    const NodeId va = g.edge(e_in).from;
    const NodeId vb = g.edge(e_out).to;
    auto rho1 = shortest_path(g, mean_weights(g, belief_l), g.base(), va);
    if (!rho1) return d;
    auto rho2 = shortest_path(g, mean_weights(g, belief_0), vb, g.base());
    if (!rho2) return d;
    const Trip probe{*rho1, *rho2};  // hop edges excluded from the check
    const auto prob = trip_success_probability(belief_l, belief_0, probe, inflated);
    if (prob.value < p.phi) return d;
    d.accepted = true;
    d.expanded = true;
    d.trip.outbound = std::move(*rho1);
    d.trip.outbound.push_back(e_in);
    d.trip.inbound.reserve(rho2->size() + 1);
    d.trip.inbound.push_back(e_out);
    d.trip.inbound.insert(d.trip.inbound.end(), rho2->begin(), rho2->end());
    return d;
}

// Full-knowledge baseline: cheapest true trip, accepted iff it fits the budget.
inline Decision plan_optimal(const Graph& g, const PhysicsConstants& k,
                             const Request& req, double budget) {
    Decision d;
    Configuration back = req.config;
    back.payload = 0;
    const auto w_out = true_weights(g, req.config, k);
    const auto w_ret = true_weights(g, back, k);
    auto rho1 = shortest_path(g, w_out, g.base(), req.dest);
    if (!rho1) return d;
    auto rho2 = shortest_path(g, w_ret, req.dest, g.base());
    if (!rho2) return d;
    const double cost = path_cost(w_out, *rho1) + path_cost(w_ret, *rho2);
    if (cost <= budget) {
        d.accepted = true;
        d.trip = Trip{std::move(*rho1), std::move(*rho2)};
    }
    return d;
}

namespace detail {

inline std::vector<int> hop_distances_to(const Graph& g, NodeId target) {
    std::vector<int> dist(g.node_count(), -1);
    std::queue<NodeId> q;
    dist[static_cast<std::size_t>(target)] = 0;
    q.push(target);
    while (!q.empty()) {
        const NodeId v = q.front();
        q.pop();
        for (EdgeId e : g.in_edges(v)) {
            const NodeId u = g.edge(e).from;
            if (dist[static_cast<std::size_t>(u)] < 0) {
                dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
                q.push(u);
            }
        }
    }
    return dist;
}

// Random walk src -> target. Free random steps are only taken while the hop
// budget allows a detour, which guarantees arrival within hop_limit.
inline std::optional<Path> biased_walk(const Graph& g, NodeId src, NodeId target,
                                       int hop_limit, Rng& rng) {
    const auto hops = hop_distances_to(g, target);
    if (hops[static_cast<std::size_t>(src)] < 0 ||
        hops[static_cast<std::size_t>(src)] > hop_limit)
        return std::nullopt;
    Path walk;
    NodeId at = src;
    int remaining = hop_limit;
    while (at != target) {
        const auto& outs = g.out_edges(at);
        std::vector<EdgeId> closer, any;
        for (EdgeId e : outs) {
            const NodeId to = g.edge(e).to;
            const int h = hops[static_cast<std::size_t>(to)];
            if (h < 0) continue;
            if (h < hops[static_cast<std::size_t>(at)]) closer.push_back(e);
            if (h <= remaining - 1) any.push_back(e);
        }
        const bool must_descend = remaining <= hops[static_cast<std::size_t>(at)];
        EdgeId pick;
        if (must_descend || any.empty() || rng.uniform() < 0.7) {
            if (closer.empty()) return std::nullopt;
            pick = closer[rng.uniform_index(closer.size())];
        } else {
            pick = any[rng.uniform_index(any.size())];
        }
        walk.push_back(pick);
        at = g.edge(pick).to;
        --remaining;
    }
    return walk;
}

}  // namespace detail

// Random baseline: distance-biased random walks out and back, always accepted
// when found.
inline Decision plan_random(const Graph& g, const Request& req, Rng& rng,
                            int hop_limit) {
    Decision d;
    auto out = detail::biased_walk(g, g.base(), req.dest, hop_limit, rng);
    if (!out) return d;
    auto ret = detail::biased_walk(g, req.dest, g.base(), hop_limit, rng);
    if (!ret) return d;
    d.accepted = true;
    d.trip = Trip{std::move(*out), std::move(*ret)};
    return d;
}

}  // namespace dronex
