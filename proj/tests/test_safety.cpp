#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dronex/generators.hpp"
#include "dronex/graph.hpp"
#include "dronex/safety.hpp"

using namespace dronex;

namespace {

double gaussian_sample(Rng& rng, double mu, double sigma) {
    double u1 = rng.uniform();
    while (u1 <= 0) u1 = rng.uniform();
    const double u2 = rng.uniform();
    return mu + sigma * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(2.0 * std::numbers::pi * u2);
}

// Rejection-sampling oracle for P(X + Y <= B | X > delta).
double truncated_mc(const TruncationContext& c, std::uint64_t seed, int wanted) {
    Rng rng(seed);
    int kept = 0, ok = 0;
    long guard = 0;
    while (kept < wanted && ++guard < 200000000) {
        const double x = gaussian_sample(rng, c.mu, std::sqrt(c.sigma2));
        if (!(x > c.delta)) continue;
        ++kept;
        const double y = gaussian_sample(rng, c.mu_backup, std::sqrt(c.sigma2_backup));
        if (x + y <= c.budget) ++ok;
    }
    return static_cast<double>(ok) / kept;
}

// line v0 - v1 - v2 - v3, dest 3, every directed edge its own belief
Graph line4() {
    std::vector<Node> nodes{{0, 0, 0}, {1, 100, 0}, {2, 200, 0}, {3, 300, 0}};
    std::vector<DirectedEdge> edges;
    int id = 0;
    for (int i = 0; i + 1 < 4; ++i) {
        edges.push_back(make_geometric_edge(id++, nodes[static_cast<std::size_t>(i)],
                                            nodes[static_cast<std::size_t>(i + 1)]));
        edges.push_back(make_geometric_edge(id++, nodes[static_cast<std::size_t>(i + 1)],
                                            nodes[static_cast<std::size_t>(i)]));
    }
    return Graph(nodes, edges, 0, {1, 2, 3});
}

}  // namespace

TEST_CASE("remaining trip probability from the base equals the trip probability") {
    const Graph g = line4();
    EnergyBelief bl(g.edge_count()), b0(g.edge_count());
    Rng rng(2);
    for (EdgeId e = 0; e < 6; ++e) {
        bl.set_prior(e, rng.uniform(3, 9), rng.uniform(0.2, 3), 1);
        b0.set_prior(e, rng.uniform(2, 7), rng.uniform(0.2, 3), 1);
    }
    const Trip t{{0, 2, 4}, {5, 3, 1}};
    const auto whole = trip_success_probability(bl, b0, t, 40);
    const auto from0 = remaining_trip_probability(bl, b0, t, 0, 40);
    CHECK(whole.value == doctest::Approx(from0.value).epsilon(1e-14));
    CHECK(whole.mu_total == doctest::Approx(from0.mu_total));
}

TEST_CASE("compute_delta worked example") {
    const Graph g = line4();
    EnergyBelief bl(g.edge_count()), b0(g.edge_count());
    // remaining from index 1: outbound edges 2,4 and the whole return leg
    bl.set_known(0, 4.0);           // already behind the drone
    bl.set_known(2, 5.0);           // known remaining
    bl.set_prior(4, 6.0, 1.0, 1);   // unknown remaining
    b0.set_prior(5, 4.0, 3.0, 1);
    b0.set_known(3, 0.0);
    b0.set_known(1, 0.0);
    const Trip t{{0, 2, 4}, {5, 3, 1}};
    // remaining: known 5, mu 10, sigma2 4 -> B'' = 2Q + 15
    const double q = normal_quantile(0.95);
    CHECK(q == doctest::Approx(1.6448536).epsilon(1e-6));
    const double d = compute_delta(bl, b0, t, 1, 30.0, 0.95);
    CHECK(d == doctest::Approx(30.0 - (2 * q + 15)).epsilon(1e-9));
    CHECK(d == doctest::Approx(11.7102928).epsilon(1e-6));

    // phi = 0.5 drops the quantile term
    CHECK(compute_delta(bl, b0, t, 1, 30.0, 0.5) == doctest::Approx(15.0).epsilon(1e-9));
}

TEST_CASE("compute_delta with a fully known remainder is budget minus cost") {
    const Graph g = line4();
    EnergyBelief bl(g.edge_count()), b0(g.edge_count());
    for (EdgeId e = 0; e < 6; ++e) {
        bl.set_known(e, 2.0);
        b0.set_known(e, 1.0);
    }
    const Trip t{{0, 2, 4}, {5, 3, 1}};
    // remaining from index 2: one outbound edge (2) + return (3)
    CHECK(compute_delta(bl, b0, t, 2, 20.0, 0.95) == doctest::Approx(15.0));
}

TEST_CASE("truncated probability matches rejection sampling") {
    const TruncationContext cases[] = {
        {10, 4, 9, 5, 1, 18},
        {10, 4, 12, 5, 1, 20},
        {6, 9, 3, 2, 0.5, 14},
        {6, 9, -20, 2, 0.5, 14},   // truncation far in the lower tail
        {15, 1, 14.5, 3, 4, 21},
    };
    std::uint64_t seed = 100;
    for (const auto& c : cases) {
        const double exact = truncated_success_probability(c);
        const double mc = truncated_mc(c, seed++, 300000);
        CHECK(exact == doctest::Approx(mc).epsilon(0.02));
        CHECK(exact >= 0);
        CHECK(exact <= 1);
    }
}

TEST_CASE("deep truncation converges to the unconditional probability") {
    TruncationContext c{10, 4, -1e6, 5, 1, 18};
    const double uncond = normal_cdf((18.0 - 15.0) / std::sqrt(5.0));
    CHECK(truncated_success_probability(c) == doctest::Approx(uncond).epsilon(1e-4));
}

TEST_CASE("point-mass and empty-conditioning branches") {
    // sigma2 = 0, mu above delta: X is certain, only Y matters
    TruncationContext pm{10, 0, 9, 5, 1, 18};
    CHECK(truncated_success_probability(pm) ==
          doctest::Approx(normal_cdf(3.0)).epsilon(1e-12));
    pm.delta = 10;  // X > delta impossible
    CHECK_THROWS_AS(truncated_success_probability(pm), EmptyConditioningError);
    // gaussian X entirely below delta
    TruncationContext far{10, 1, 30, 5, 1, 18};
    CHECK_THROWS_AS(truncated_success_probability(far), EmptyConditioningError);
}

TEST_CASE("threshold abort is equivalent to the probability test") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const Graph g = line4();
        EnergyBelief bl(g.edge_count()), b0(g.edge_count());
        for (EdgeId e = 0; e < 6; ++e) {
            if (rng.uniform() < 0.3) {
                bl.set_known(e, rng.uniform(1, 8));
            } else {
                bl.set_prior(e, rng.uniform(1, 8), rng.uniform(0.1, 3), 1);
            }
            if (rng.uniform() < 0.3) {
                b0.set_known(e, rng.uniform(1, 6));
            } else {
                b0.set_prior(e, rng.uniform(1, 6), rng.uniform(0.1, 3), 1);
            }
        }
        const Trip t{{0, 2, 4}, {5, 3, 1}};
        const double budget = rng.uniform(20, 50);
        const double phi = rng.uniform(0.05, 0.99);
        const std::size_t idx = rng.uniform_index(3);
        const double delta = compute_delta(bl, b0, t, idx, budget, phi);
        const double used = delta + rng.uniform(-3, 3);
        const bool by_threshold = used > delta;
        const bool by_probability =
            remaining_trip_probability(bl, b0, t, idx, budget - used).value < phi;
        CHECK(by_threshold == by_probability);
    }
}

TEST_CASE("build_safe_trip produces backups and thresholds per outbound node") {
    const Graph g = line4();
    EnergyBelief bl(g.edge_count()), b0(g.edge_count());
    for (EdgeId e = 0; e < 6; ++e) {
        bl.set_prior(e, 3.0, 0.25, 1);
        b0.set_prior(e, 2.0, 0.25, 1);
    }
    const Trip t{{0, 2, 4}, {5, 3, 1}};
    const auto plan = build_safe_trip(bl, b0, g, t, 3, 60.0, 0.95, 0.9, 1.0);
    REQUIRE(plan);
    CHECK(plan->reserved == 2.0);
    CHECK(plan->kappa == 0.9);
    // outbound nodes 0, 1, 2 all present; dest 3 absent
    CHECK(plan->delta.size() == 3);
    CHECK(plan->backup.size() == 3);
    CHECK(plan->backup.at(0).empty());
    CHECK(plan->backup.at(1) == Path{1});
    CHECK(plan->backup.at(2) == Path{3, 1});
    CHECK(plan->delta.count(3) == 0);
    // thresholds shrink as the drone advances? no: remaining cost shrinks, so
    // delta grows with the index
    CHECK(plan->delta.at(1) < plan->delta.at(2));

    // a tight budget fails condition (1)
    CHECK(!build_safe_trip(bl, b0, g, t, 3, 18.0, 0.95, 0.9, 1.0));
    CHECK_THROWS(build_safe_trip(bl, b0, g, t, 3, 60.0, 0.95, 1.5, 1.0));
    CHECK_THROWS(build_safe_trip(bl, b0, g, t, 3, 60.0, 0.95, 0.9, 0.0));
}

TEST_CASE("abort_check and mid_edge_turnaround boundaries") {
    SafePlan plan;
    plan.delta[1] = 5.0;
    CHECK(abort_check(plan, 1, 5.0) == AbortAction::Continue);  // strict >
    CHECK(abort_check(plan, 1, 5.0001) == AbortAction::Divert);
    CHECK(abort_check(plan, 9, 1e9) == AbortAction::Continue);  // unknown node

    CHECK(mid_edge_turnaround(2.0, 2.0) == EdgeAction::ContinueEdge);
    CHECK(mid_edge_turnaround(2.0000001, 2.0) == EdgeAction::TurnBack);
}
