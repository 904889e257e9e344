#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dronex/belief.hpp"
#include "dronex/gaussian.hpp"
#include "dronex/reachability.hpp"

namespace dronex {

struct EmptyConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Contingency plan: the trip plus, for every outbound node before the
// destination, a backup path home and the abort threshold on consumed energy.
struct SafePlan {
    Trip trip;
    NodeId dest = 0;
    std::map<NodeId, Path> backup;   // outbound node -> path to base
    std::map<NodeId, double> delta;  // outbound node -> abort threshold
    double reserved = 0;             // 2 * e_max, excluded from planning
    double kappa = 0;
};

// Consumed-so-far X ~ N(mu, sigma2) truncated to X > delta, plus an
// independent backup cost Y ~ N(mu_backup, sigma2_backup), against budget.
struct TruncationContext {
    double mu = 0;
    double sigma2 = 0;
    double delta = 0;
    double mu_backup = 0;
    double sigma2_backup = 0;
    double budget = 0;
};

// Nodes visited on the outbound leg, in order, excluding the destination.
inline std::vector<NodeId> outbound_nodes(const Graph& g, const Trip& trip) {
    std::vector<NodeId> nodes{g.base()};
    for (std::size_t i = 0; i + 1 < trip.outbound.size(); ++i)
        nodes.push_back(g.edge(trip.outbound[i]).to);
    return nodes;
}

// Moments of the remaining trip from outbound position `from_index` (index
// into outbound_nodes) through dest and home.
inline PathMoments remaining_trip_moments(const EnergyBelief& belief_l,
                                          const EnergyBelief& belief_0,
                                          const Trip& trip, std::size_t from_index) {
    PathMoments m;
    for (std::size_t i = from_index; i < trip.outbound.size(); ++i) {
        const EdgeId e = trip.outbound[i];
        if (belief_l.is_known(e))
            m.known_cost += belief_l.known_value(e);
        else {
            m.mu += belief_l.belief(e).mu;
            m.sigma2 += belief_l.belief(e).sigma2;
        }
    }
    for (EdgeId e : trip.inbound) {
        if (belief_0.is_known(e))
            m.known_cost += belief_0.known_value(e);
        else {
            m.mu += belief_0.belief(e).mu;
            m.sigma2 += belief_0.belief(e).sigma2;
        }
    }
    return m;
}

inline SuccessProbability remaining_trip_probability(const EnergyBelief& belief_l,
                                                     const EnergyBelief& belief_0,
                                                     const Trip& trip,
                                                     std::size_t from_index,
                                                     double remaining_budget) {
    const PathMoments m = remaining_trip_moments(belief_l, belief_0, trip, from_index);
    return success_from_moments(remaining_budget, m.known_cost, m.mu, m.sigma2);
}

// Abort threshold at outbound node index i: the most energy the drone may
// have burned before the remaining trip's success probability drops below
// phi. Precomputable before departure.
inline double compute_delta(const EnergyBelief& belief_l, const EnergyBelief& belief_0,
                            const Trip& trip, std::size_t from_index, double budget,
                            double phi) {
    const PathMoments m = remaining_trip_moments(belief_l, belief_0, trip, from_index);
    double b2;
    if (m.sigma2 > 0) {
        const double q = normal_quantile(phi);
        b2 = q * std::sqrt(m.sigma2) + m.mu + m.known_cost;
    } else {
        b2 = m.mu + m.known_cost;  // fully known remaining cost
    }
    return budget - b2;
}

// P(X + Y <= B | X > delta) by numerical convolution over the truncated
// density of X.
inline double truncated_success_probability(const TruncationContext& c) {
    const double sx = std::sqrt(std::max(0.0, c.sigma2));
    const double sy = std::sqrt(std::max(0.0, c.sigma2_backup));

    auto backup_cdf = [&](double rest) {
        if (sy > 0) return normal_cdf((rest - c.mu_backup) / sy);
        return rest >= c.mu_backup ? 1.0 : 0.0;
    };

    if (sx == 0) {
        // X is a point mass at mu; conditioning on X > delta keeps it or empties it
        if (!(c.mu > c.delta))
            throw EmptyConditioningError("X > delta has zero probability");
        return backup_cdf(c.budget - c.mu);
    }

    const double z_delta = (c.delta - c.mu) / sx;
    const double tail = 1.0 - normal_cdf(z_delta);
    if (tail <= 1e-12)
        throw EmptyConditioningError("X > delta has negligible probability");

    // integrate from the truncation point to far into the upper tail
    const double lo = std::max(c.delta, c.mu - 10 * sx);
    const double hi = c.mu + 10 * sx;
    if (hi <= lo) return 0.0;
    const int n = 4000;  // Simpson; ~1e-6 absolute at these smooth integrands
    const double h = (hi - lo) / n;
    double acc = 0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + i * h;
        const double f = normal_pdf((x - c.mu) / sx) / sx * backup_cdf(c.budget - x);
        const double coeff = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += coeff * f;
    }
    const double integral = acc * h / 3.0;
    return std::min(1.0, std::max(0.0, integral / tail));
}

// Moments of the outbound prefix up to node index i (consumed-so-far X):
// mean includes known costs, variance only the unknowns.
inline TruncationContext prefix_context(const EnergyBelief& belief_l,
                                        const Trip& trip, std::size_t node_index,
                                        double delta, const PathMoments& backup,
                                        double budget) {
    TruncationContext c;
    for (std::size_t i = 0; i < node_index; ++i) {
        const EdgeId e = trip.outbound[i];
        if (belief_l.is_known(e)) {
            c.mu += belief_l.known_value(e);
        } else {
            c.mu += belief_l.belief(e).mu;
            c.sigma2 += belief_l.belief(e).sigma2;
        }
    }
    c.delta = delta;
    c.mu_backup = backup.known_cost + backup.mu;
    c.sigma2_backup = backup.sigma2;
    c.budget = budget;
    return c;
}

// Builds the kappa-safe plan for an accepted trip, or nothing if the trip or
// any backup fails its threshold. Planning budget excludes the reserved
// 2*e_max. Backup paths are priced under payload l: the package is still on
// board when the drone aborts.
inline std::optional<SafePlan> build_safe_trip(const EnergyBelief& belief_l,
                                               const EnergyBelief& belief_0,
                                               const Graph& g, const Trip& trip,
                                               NodeId dest, double budget, double phi,
                                               double kappa, double e_max) {
    if (!(kappa >= 0) || !(kappa <= 1) || !(e_max > 0))
        throw std::invalid_argument("bad kappa or e_max");
    SafePlan plan;
    plan.trip = trip;
    plan.dest = dest;
    plan.reserved = 2 * e_max;
    plan.kappa = kappa;
    const double planning_budget = budget - plan.reserved;

    // condition (1): the trip itself clears kappa
    const auto trip_p = trip_success_probability(belief_l, belief_0, trip, planning_budget);
    if (trip_p.value < kappa) return std::nullopt;

    const auto nodes = outbound_nodes(g, trip);
    const auto w_back = mean_weights(g, belief_l);
    const SpTree home = sp_tree(g, w_back, g.base(), true);

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const NodeId v = nodes[i];
        const double delta =
            compute_delta(belief_l, belief_0, trip, i, planning_budget, phi);
        plan.delta[v] = delta;
        if (v == g.base()) {
            plan.backup[v] = Path{};  // already home
            continue;
        }
        auto back = tree_path(g, home, v);
        if (!back) return std::nullopt;
        const PathMoments bm = path_moments(belief_l, *back);
        const TruncationContext ctx =
            prefix_context(belief_l, trip, i, delta, bm, planning_budget);
        double p;
        try {
            p = truncated_success_probability(ctx);
        } catch (const EmptyConditioningError&) {
            // abort at v is (numerically) impossible, so no backup is needed
            plan.backup[v] = std::move(*back);
            continue;
        }
        if (p < kappa) return std::nullopt;
        plan.backup[v] = std::move(*back);
    }
    return plan;
}

enum class AbortAction { Continue, Divert };

// In-flight check at an outbound node: divert onto the backup path once the
// energy already used exceeds the precomputed threshold.
inline AbortAction abort_check(const SafePlan& plan, NodeId at, double energy_used) {
    const auto it = plan.delta.find(at);
    if (it == plan.delta.end()) return AbortAction::Continue;  // at/after dest
    return energy_used > it->second ? AbortAction::Divert : AbortAction::Continue;
}

enum class EdgeAction { ContinueEdge, TurnBack };

// Mid-edge rule on unexplored edges: past e_max spent, turn around; the
// retreat is modeled as costing what was already spent.
inline EdgeAction mid_edge_turnaround(double spent, double e_max) {
    return spent > e_max ? EdgeAction::TurnBack : EdgeAction::ContinueEdge;
}

}  // namespace dronex
