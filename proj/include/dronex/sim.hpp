#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dronex/belief.hpp"
#include "dronex/energy.hpp"
#include "dronex/graph.hpp"
#include "dronex/reachability.hpp"
#include "dronex/rng.hpp"
#include "dronex/safety.hpp"
#include "dronex/strategies.hpp"

namespace dronex {

enum class Strategy { ShortestPath, Frontier, Optimal, Random };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::ShortestPath: return "shortest-path";
        case Strategy::Frontier: return "frontier";
        case Strategy::Optimal: return "optimal";
        case Strategy::Random: return "random";
    }
    return "?";
}

inline std::optional<Strategy> strategy_from_name(const std::string& s) {
    if (s == "shortest-path") return Strategy::ShortestPath;
    if (s == "frontier") return Strategy::Frontier;
    if (s == "optimal") return Strategy::Optimal;
    if (s == "random") return Strategy::Random;
    return std::nullopt;
}

struct SimConfig {
    Strategy strategy = Strategy::Frontier;
    int requests = 1000;
    double phi = 0.95;
    double alpha = 0.0;
    double beta = 0.05;
    double kappa = 0.95;
    bool safety = false;
    double e_max = 0;  // <= 0: derived from the initial belief means
    double budget_fraction = 0.6;
    double payload_min = 0.0, payload_max = 2.0;   // kg
    double speed_min = 0.0, speed_max = 8.0;       // m/s
    double prior_k = 0.04, prior_w0 = 1.0;
    double c1 = 1.0, c2 = 0.01;
    bool cross_bin_transfer = true;
    std::uint64_t seed = 1;
    bool round_robin = false;  // cycle destinations instead of sampling
    std::optional<Configuration> fixed_config;  // pin every request's config
    PhysicsConstants physics;
};

struct MetricsRow {
    int request = 0;  // 1-based
    bool accepted = false;
    bool success = false;
    bool aborted = false;
    double recall = 0;
    double precision = 0;
    double edge_coverage = 0;
    double acc_rate = 0;
    double succ_rate = 0;
    double del_rate = 0;
};

struct FlightOutcome {
    bool accepted = false;
    bool success = false;
    bool aborted = false;
    bool lost = false;  // energy exhausted mid-flight
    double energy_used = 0;
    std::vector<EdgeId> traversed;
};

// Empty-truth and empty-prediction conventions: both vacuously perfect.
inline void set_recall_precision(MetricsRow& row, const std::set<NodeId>& pred,
                                 const std::set<NodeId>& truth) {
    std::size_t hit = 0;
    for (NodeId v : pred)
        if (truth.count(v)) ++hit;
    row.recall = truth.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(truth.size());
    row.precision = pred.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(pred.size());
}

inline double edge_coverage(const std::vector<char>& visited,
                            const std::vector<char>& optimal) {
    std::size_t total = 0, hit = 0;
    for (std::size_t i = 0; i < optimal.size(); ++i) {
        if (!optimal[i]) continue;
        ++total;
        if (visited[i]) ++hit;
    }
    return total == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(total);
}

struct SimResult {
    std::vector<MetricsRow> rows;
    int accepted = 0;
    int succeeded = 0;
    int aborted = 0;
    int lost = 0;
    double budget = 0;
    double e_max = 0;
    std::unique_ptr<BeliefBank> bank;  // final belief state
};

namespace detail {

// Union of edges on the true shortest trips to every truly reachable
// destination, as a flag vector.
inline std::vector<char> optimal_trip_edges(const Graph& g, const PhysicsConstants& k,
                                            const Configuration& cfg, double budget) {
    Configuration back = cfg;
    back.payload = 0;
    const auto w_out = true_weights(g, cfg, k);
    const auto w_ret = true_weights(g, back, k);
    const SpTree out = sp_tree(g, w_out, g.base(), false);
    const SpTree ret = sp_tree(g, w_ret, g.base(), true);
    std::vector<char> mark(g.edge_count(), 0);
    std::vector<char> seen_out(g.node_count(), 0), seen_ret(g.node_count(), 0);
    for (NodeId d : g.destinations()) {
        const std::size_t i = static_cast<std::size_t>(d);
        if (out.dist[i] + ret.dist[i] > budget) continue;
        NodeId at = d;
        while (at != g.base() && !seen_out[static_cast<std::size_t>(at)]) {
            seen_out[static_cast<std::size_t>(at)] = 1;
            const EdgeId e = out.parent_edge[static_cast<std::size_t>(at)];
            mark[static_cast<std::size_t>(e)] = 1;
            at = g.edge(e).from;
        }
        at = d;
        while (at != g.base() && !seen_ret[static_cast<std::size_t>(at)]) {
            seen_ret[static_cast<std::size_t>(at)] = 1;
            const EdgeId e = ret.parent_edge[static_cast<std::size_t>(at)];
            mark[static_cast<std::size_t>(e)] = 1;
            at = g.edge(e).to;
        }
    }
    return mark;
}

}  // namespace detail

// Walks the decision's trip against ground truth, charging true energies,
// recording measurements into the bank, and honoring the contingency plan
// when one is given. Failures are outcomes, never errors.
inline FlightOutcome execute_flight(const Graph& g, const PhysicsConstants& k,
                                    const Configuration& cfg, const Decision& decision,
                                    double budget, BeliefBank& bank,
                                    const SafePlan* plan, double e_max) {
    FlightOutcome fo;
    fo.accepted = true;
    Configuration back = cfg;
    back.payload = 0;
    const int bin_l = bank.nearest(cfg);
    const int bin_0 = bank.nearest(back);

    double energy = 0;
    bool dest_visited = false;
    bool reached_base = false;

    // Traverses one edge under `leg_cfg`, recording the measurement when the
    // edge was unknown in the leg's bin. Returns false once energy runs out.
    auto traverse = [&](EdgeId e, const Configuration& leg_cfg, int bin) {
        const double c = true_edge_energy(g.edge(e), leg_cfg, k);
        if (energy + c > budget) {
            fo.lost = true;
            energy = budget;
            return false;
        }
        energy += c;
        fo.traversed.push_back(e);
        if (!bank.bin(bin).is_known(e)) bank.record_measurement(bin, e, leg_cfg, c);
        return true;
    };

    // Flies a path home under `leg_cfg` with no further contingency checks.
    auto fly_home = [&](const Path& p, const Configuration& leg_cfg, int bin,
                        NodeId from) {
        NodeId at = from;
        for (EdgeId e : p) {
            if (!traverse(e, leg_cfg, bin)) return;
            at = g.edge(e).to;
        }
        reached_base = (at == g.base());
    };

    // Shortest mean-weight route home used when a turnaround happens off the
    // planned backup structure; the offending edge is excluded.
    auto reroute_home = [&](NodeId from, EdgeId bad, const Configuration& leg_cfg,
                            int bin, const EnergyBelief& belief) {
        auto w = mean_weights(g, belief);
        // price the bad edge above any real path, but within float range so
        // relaxations stay exact
        double big = 1;
        for (double x : w) big += x;
        w[static_cast<std::size_t>(bad)] = big;
        const auto p = shortest_path(g, w, from, g.base());
        if (p && path_cost(w, *p) < big) fly_home(*p, leg_cfg, bin, from);
    };

    // outbound leg
    NodeId at = g.base();
    for (EdgeId e : decision.trip.outbound) {
        if (plan) {
            const AbortAction a = abort_check(*plan, at, energy);
            if (a == AbortAction::Divert) {
                fo.aborted = true;
                fly_home(plan->backup.at(at), cfg, bin_l, at);
                fo.energy_used = energy;
                return fo;
            }
            const double c = true_edge_energy(g.edge(e), cfg, k);
            if (!bank.bin(bin_l).is_known(e) &&
                mid_edge_turnaround(c, e_max) == EdgeAction::TurnBack) {
                // out-and-back on the over-long edge drains up to 2*e_max
                const double drain = 2 * e_max;
                fo.aborted = true;
                if (energy + drain > budget) {
                    fo.lost = true;
                    energy = budget;
                    fo.energy_used = energy;
                    return fo;
                }
                energy += drain;
                auto it = plan->backup.find(at);
                if (it != plan->backup.end())
                    fly_home(it->second, cfg, bin_l, at);
                else
                    reroute_home(at, e, cfg, bin_l, bank.bin(bin_l));
                fo.energy_used = energy;
                return fo;
            }
        }
        if (!traverse(e, cfg, bin_l)) {
            fo.energy_used = energy;
            return fo;
        }
        at = g.edge(e).to;
    }
    dest_visited = true;  // payload drops here

    // return leg
    for (EdgeId e : decision.trip.inbound) {
        if (plan) {
            const double c = true_edge_energy(g.edge(e), back, k);
            if (!bank.bin(bin_0).is_known(e) &&
                mid_edge_turnaround(c, e_max) == EdgeAction::TurnBack) {
                const double drain = 2 * e_max;
                fo.aborted = true;
                if (energy + drain > budget) {
                    fo.lost = true;
                    energy = budget;
                    fo.energy_used = energy;
                    return fo;
                }
                energy += drain;
                reroute_home(at, e, back, bin_0, bank.bin(bin_0));
                fo.energy_used = energy;
                fo.success = dest_visited && reached_base;
                return fo;
            }
        }
        if (!traverse(e, back, bin_0)) {
            fo.energy_used = energy;
            return fo;
        }
        at = g.edge(e).to;
    }
    reached_base = (at == g.base());
    fo.energy_used = energy;
    fo.success = dest_visited && reached_base && energy <= budget;
    return fo;
}

inline Request generate_request(Rng& rng, const Graph& g,
                                const std::vector<NodeId>& dests,
                                const SimConfig& cfg) {
    Request r;
    r.dest = dests[rng.uniform_index(dests.size())];
    if (cfg.fixed_config) {
        r.config = *cfg.fixed_config;
    } else {
        r.config.payload = rng.uniform(cfg.payload_min, cfg.payload_max);
        r.config.wind_speed = rng.uniform(cfg.speed_min, cfg.speed_max);
        r.config.wind_direction = rng.uniform(0, kTwoPi);
    }
    (void)g;
    return r;
}

inline SimResult run_simulation(const Graph& g, const SimConfig& cfg) {
    if (cfg.requests < 1) throw std::invalid_argument("request count must be >= 1");
    if (!(cfg.phi >= 0 && cfg.phi <= 1) || !(cfg.alpha >= 0) ||
        !(cfg.beta >= 0 && cfg.beta <= 1) || !(cfg.kappa >= 0 && cfg.kappa <= 1))
        throw std::invalid_argument("strategy thresholds out of range");
    if (cfg.speed_max >= cfg.physics.v_max)
        throw std::invalid_argument("wind speeds must stay below v_max");

    SimResult res;
    // Budget picked at the calm mid-payload configuration so the same drone
    // serves every request.
    const Configuration budget_cfg{0.5 * (cfg.payload_min + cfg.payload_max), 0.0, 0.0};
    res.budget = choose_budget(g, cfg.physics, budget_cfg, cfg.budget_fraction).value;

    const ConfigGrid grid(cfg.speed_min, cfg.speed_max, cfg.payload_min, cfg.payload_max);
    res.bank = std::make_unique<BeliefBank>(g, grid, cfg.prior_k, cfg.prior_w0, cfg.c1,
                                            cfg.c2, cfg.cross_bin_transfer, cfg.seed);
    BeliefBank& bank = *res.bank;

    double e_max = cfg.e_max;
    if (!(e_max > 0)) {
        e_max = 0;
        for (int b = 0; b < ConfigGrid::kBins; ++b)
            for (const auto& e : g.edges())
                e_max = std::max(e_max, bank.bin(b).mean(e.id));
    }
    res.e_max = e_max;
    if (cfg.safety && res.budget <= 2 * e_max)
        throw std::invalid_argument("budget too small for the reserved energy");
    const double planning_budget = cfg.safety ? res.budget - 2 * e_max : res.budget;

    const std::vector<NodeId> dests(g.destinations().begin(), g.destinations().end());
    const int hop_limit = 2 * static_cast<int>(g.node_count());
    std::vector<char> visited_edges(g.edge_count(), 0);
    StrategyParams params{cfg.phi, cfg.alpha, cfg.beta};

    res.rows.reserve(static_cast<std::size_t>(cfg.requests));
    for (int t = 0; t < cfg.requests; ++t) {
        Rng req_rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(2 * t));
        Rng strat_rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(2 * t + 1));

        Request req = generate_request(req_rng, g, dests, cfg);
        if (cfg.round_robin)
            req.dest = dests[static_cast<std::size_t>(t) % dests.size()];

        Configuration back = req.config;
        back.payload = 0;
        const int bin_l = bank.nearest(req.config);
        const int bin_0 = bank.nearest(back);

        Decision decision;
        switch (cfg.strategy) {
            case Strategy::ShortestPath:
                decision = plan_shortest_path(bank.bin(bin_l), bank.bin(bin_0), g, req,
                                              planning_budget, params);
                break;
            case Strategy::Frontier:
                decision = plan_frontier(bank.bin(bin_l), bank.bin(bin_0), g, req,
                                         planning_budget, params, strat_rng);
                break;
            case Strategy::Optimal:
                decision = plan_optimal(g, cfg.physics, req, planning_budget);
                break;
            case Strategy::Random:
                decision = plan_random(g, req, strat_rng, hop_limit);
                break;
        }

        std::optional<SafePlan> plan;
        if (decision.accepted && cfg.safety) {
            plan = build_safe_trip(bank.bin(bin_l), bank.bin(bin_0), g, decision.trip,
                                   req.dest, res.budget, cfg.phi, cfg.kappa, e_max);
            if (!plan) decision = Decision{};  // no safe contingency, reject
        }

        MetricsRow row;
        row.request = t + 1;
        row.accepted = decision.accepted;
        if (decision.accepted) {
            const FlightOutcome fo =
                execute_flight(g, cfg.physics, req.config, decision, res.budget, bank,
                               plan ? &*plan : nullptr, e_max);
            row.success = fo.success;
            row.aborted = fo.aborted;
            for (EdgeId e : fo.traversed) visited_edges[static_cast<std::size_t>(e)] = 1;
            ++res.accepted;
            if (fo.success) ++res.succeeded;
            if (fo.aborted) ++res.aborted;
            if (fo.lost) ++res.lost;
        }

        const auto truth = true_reachable_set(g, cfg.physics, req.config, res.budget);
        std::set<NodeId> predicted;
        if (cfg.strategy == Strategy::Optimal) {
            predicted = truth;  // full knowledge
        } else {
            predicted = probabilistic_reachable_set(bank.bin(bin_l), bank.bin(bin_0), g,
                                                    res.budget, cfg.phi)
                            .members;
        }
        set_recall_precision(row, predicted, truth);
        const auto optimal =
            detail::optimal_trip_edges(g, cfg.physics, req.config, res.budget);
        row.edge_coverage = edge_coverage(visited_edges, optimal);

        row.acc_rate = static_cast<double>(res.accepted) / (t + 1);
        row.succ_rate = res.accepted == 0
                            ? 1.0
                            : static_cast<double>(res.succeeded) / res.accepted;
        row.del_rate = static_cast<double>(res.succeeded) / (t + 1);
        res.rows.push_back(row);
    }
    return res;
}

}  // namespace dronex
