// Acceptance suite: one pass/fail line per criterion. An optional argv list
// of criterion numbers restricts the run.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dronex/experiment.hpp"
#include "dronex/generators.hpp"
#include "dronex/graph.hpp"
#include "dronex/reachability.hpp"
#include "dronex/safety.hpp"
#include "dronex/sim.hpp"

using namespace dronex;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double gaussian_sample(Rng& rng, double mu, double sigma) {
    double u1 = rng.uniform();
    while (u1 <= 0) u1 = rng.uniform();
    const double u2 = rng.uniform();
    return mu + sigma * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(2.0 * std::numbers::pi * u2);
}

// Random belief pair over a graph: a mix of known and unknown edges.
void randomize_beliefs(Rng& rng, const Graph& g, EnergyBelief& bl, EnergyBelief& b0) {
    for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) {
        if (rng.uniform() < 0.3) {
            bl.set_known(e, rng.uniform(1, 10));
        } else {
            bl.set_prior(e, rng.uniform(1, 10), rng.uniform(0.05, 4), 1);
        }
        if (rng.uniform() < 0.3) {
            b0.set_known(e, rng.uniform(1, 8));
        } else {
            b0.set_prior(e, rng.uniform(1, 8), rng.uniform(0.05, 4), 1);
        }
    }
}

// ---------------------------------------------------------------- criterion 1

bool criterion1() {
    const auto t0 = Clock::now();
    Rng rng(10001);
    double worst = 0;
    const int samples = 1000000;
    for (int inst = 0; inst < 50; ++inst) {
        const Graph g = generate_random_map(12, 500, 500, 3, 20000 + inst);
        EnergyBelief bl(g.edge_count()), b0(g.edge_count());
        randomize_beliefs(rng, g, bl, b0);
        const NodeId dest = 1 + static_cast<NodeId>(rng.uniform_index(g.node_count() - 1));
        const auto trip = surrogate_trip(g, bl, b0, dest);
        if (!trip) return false;

        const bool path_only = inst % 2 == 1;
        PathMoments m;
        std::vector<std::pair<double, double>> unknowns;  // (mu, sigma)
        auto collect = [&](const EnergyBelief& b, const Path& p) {
            for (EdgeId e : p) {
                if (b.is_known(e)) {
                    m.known_cost += b.known_value(e);
                } else {
                    m.mu += b.belief(e).mu;
                    m.sigma2 += b.belief(e).sigma2;
                    unknowns.emplace_back(b.belief(e).mu,
                                          std::sqrt(b.belief(e).sigma2));
                }
            }
        };
        collect(bl, trip->outbound);
        if (!path_only) collect(b0, trip->inbound);

        // budget placed where the probability is non-trivial
        const double budget =
            m.known_cost + m.mu + rng.uniform(-2.0, 2.0) * std::sqrt(m.sigma2 + 1e-12);
        const double analytic =
            path_only
                ? path_success_probability(bl, trip->outbound, budget).value
                : trip_success_probability(bl, b0, *trip, budget).value;

        int ok = 0;
        for (int s = 0; s < samples; ++s) {
            double total = m.known_cost;
            for (const auto& [mu, sigma] : unknowns)
                total += gaussian_sample(rng, mu, sigma);
            if (total <= budget) ++ok;
        }
        const double mc = static_cast<double>(ok) / samples;
        worst = std::max(worst, std::fabs(analytic - mc));
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst < 0.005 && elapsed < 60.0;
    std::printf("criterion 1: %s (max |analytic - mc| = %.5f over 50 instances, %.1f s)\n",
                pass ? "PASS" : "FAIL", worst, elapsed);
    return pass;
}

// ---------------------------------------------------------------- criterion 2

bool criterion2() {
    Rng rng(10002);
    double worst = 0;
    for (int seq = 0; seq < 100; ++seq) {
        const double mu0 = rng.uniform(1, 20);
        const double s20 = rng.uniform(0.01, 9);
        const double w0 = rng.uniform(0.1, 5);
        GaussianBelief inc;
        inc.mu = mu0;
        inc.sigma2 = s20;
        inc.eta2 = s20 + mu0 * mu0;
        inc.weight = w0;

        double sw = w0, swe = w0 * mu0, swe2 = w0 * (s20 + mu0 * mu0);
        const int len = 1 + static_cast<int>(rng.uniform_index(100));
        for (int i = 0; i < len; ++i) {
            const double est = rng.uniform(0, 25);
            const double w = rng.uniform(0.001, 3);
            inc.absorb(est, w);
            sw += w;
            swe += w * est;
            swe2 += w * est * est;
        }
        const double mu_b = swe / sw;
        const double eta2_b = swe2 / sw;
        const double s2_b = std::max(0.0, eta2_b - mu_b * mu_b);
        auto rel = [](double a, double b) {
            return std::fabs(a - b) / std::max(1.0, std::fabs(b));
        };
        worst = std::max({worst, rel(inc.mu, mu_b), rel(inc.eta2, eta2_b),
                          rel(inc.sigma2, s2_b), rel(inc.weight, sw)});
    }
    const bool pass = worst <= 1e-9;
    std::printf("criterion 2: %s (max relative moment error = %.2e over 100 sequences)\n",
                pass ? "PASS" : "FAIL", worst);
    return pass;
}

// ---------------------------------------------------------------- criterion 3

bool criterion3() {
    Rng rng(10003);
    PhysicsConstants k;
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng.uniform_index(6);  // 3..8 nodes
        const Graph g = generate_random_map(n, 300, 300, 2, 30000 + static_cast<std::uint64_t>(trial));
        const Configuration cfg{rng.uniform(0, 2), rng.uniform(0, 10),
                                rng.uniform(0, kTwoPi)};
        Configuration back = cfg;
        back.payload = 0;
        const auto w_out = true_weights(g, cfg, k);
        const auto w_ret = true_weights(g, back, k);

        // median round trip sets an interesting budget scale
        std::vector<double> rts;
        for (NodeId d : g.destinations()) {
            const std::size_t i = static_cast<std::size_t>(d);
            const auto c = round_trip_costs(g, cfg, k);
            rts.push_back(c[i]);
        }
        std::sort(rts.begin(), rts.end());
        const double budget = rts[rts.size() / 2] * rng.uniform(0.5, 1.5);

        const auto fast = true_reachable_set(g, k, cfg, budget);

        std::set<NodeId> slow;
        for (NodeId d : g.destinations()) {
            double best = kInf;
            for (const auto& o : detail::all_simple_paths(g, g.base(), d))
                for (const auto& r : detail::all_simple_paths(g, d, g.base()))
                    best = std::min(best, path_cost(w_out, o) + path_cost(w_ret, r));
            if (best <= budget) slow.insert(d);
        }
        if (fast != slow) ++mismatches;
    }
    const bool pass = mismatches == 0;
    std::printf("criterion 3: %s (%d/200 graphs mismatched exhaustive enumeration)\n",
                pass ? "PASS" : "FAIL", mismatches);
    return pass;
}

// ---------------------------------------------------------------- criterion 4

bool criterion4() {
    const auto t0 = Clock::now();
    const std::size_t sizes[] = {15, 18, 21, 24, 27, 30, 16, 20, 25, 29};
    int converged = 0;
    for (int run = 0; run < 10; ++run) {
        const Graph g = generate_random_map(sizes[run], 1000, 1000, 3,
                                            40000 + static_cast<std::uint64_t>(run));
        SimConfig c;
        c.strategy = Strategy::Frontier;
        c.requests = 5000;
        c.phi = 0.95;
        c.beta = 0.05;
        c.round_robin = true;
        c.seed = 50000 + static_cast<std::uint64_t>(run);
        // one configuration, chosen inside the lowest payload/speed bin so both
        // trip legs share a single belief bin
        c.fixed_config = Configuration{0.25, 0.8, 0.0};
        const SimResult r = run_simulation(g, c);
        bool stable = true;
        for (std::size_t i = r.rows.size() - 500; i < r.rows.size(); ++i) {
            if (r.rows[i].recall != 1.0 || r.rows[i].precision != 1.0) {
                stable = false;
                break;
            }
        }
        if (stable) ++converged;
    }
    const double elapsed = seconds_since(t0);
    const bool pass = converged >= 9 && elapsed < 300.0;
    std::printf("criterion 4: %s (%d/10 runs converged and held for the last 500 requests, %.1f s)\n",
                pass ? "PASS" : "FAIL", converged, elapsed);
    return pass;
}

// ---------------------------------------------------------------- criterion 5

bool criterion5() {
    int prec_wins = 0, cov_wins = 0;
    double recall_gap = 0;
    // local proximity transfer per bin keeps unexplored regions on their
    // priors, which is the regime where exploration strategies separate;
    // metrics are averaged over the last 100 requests to cut snapshot noise
    for (int s = 0; s < 10; ++s) {
        const Graph g = generate_random_map(200, 1000, 1000, 3,
                                            60000 + static_cast<std::uint64_t>(s));
        SimConfig c;
        c.requests = 2000;
        c.seed = 70000 + static_cast<std::uint64_t>(s);
        c.c2 = 0.1;
        c.cross_bin_transfer = false;
        auto tail_mean = [](const SimResult& r) {
            double prec = 0, rec = 0, cov = 0;
            for (std::size_t i = r.rows.size() - 100; i < r.rows.size(); ++i) {
                prec += r.rows[i].precision;
                rec += r.rows[i].recall;
                cov += r.rows[i].edge_coverage;
            }
            return std::array<double, 3>{prec / 100, rec / 100, cov / 100};
        };
        c.strategy = Strategy::Frontier;
        const auto fr = tail_mean(run_simulation(g, c));
        c.strategy = Strategy::ShortestPath;
        const auto sp = tail_mean(run_simulation(g, c));
        if (fr[0] > sp[0]) ++prec_wins;
        if (fr[2] > sp[2]) ++cov_wins;
        recall_gap += std::fabs(fr[1] - sp[1]);
    }
    recall_gap /= 10;
    const bool pass = prec_wins >= 8 && cov_wins >= 8 && recall_gap < 0.05;
    std::printf("criterion 5: %s (frontier wins precision %d/10, coverage %d/10, mean |recall gap| = %.3f)\n",
                pass ? "PASS" : "FAIL", prec_wins, cov_wins, recall_gap);
    return pass;
}

// ---------------------------------------------------------------- criterion 6

bool criterion6() {
    // Fixed configuration plus round-robin requests keep the belief state in
    // one bin, so by the end of the run every strategy has converged and the
    // delivery rate depends on alpha only through the early transient. A
    // moderate phi keeps the alpha=0 acceptance margin from freezing out the
    // frontier destinations that ShortestPath never explores.
    const Graph g = generate_random_map(50, 1000, 1000, 3, 80000);
    const double alphas[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    bool pass = true;
    std::string detail;
    for (Strategy strat : {Strategy::Frontier, Strategy::ShortestPath}) {
        std::vector<double> acc, succ, prec, del;
        for (double a : alphas) {
            double sa = 0, ss = 0, sp = 0, sd = 0;
            for (int seed = 0; seed < 10; ++seed) {
                SimConfig c;
                c.strategy = strat;
                c.alpha = a;
                c.phi = 0.85;
                c.requests = 2000;
                c.round_robin = true;
                c.fixed_config = Configuration{1.0, 2.0, 0.5};
                c.seed = 90000 + static_cast<std::uint64_t>(seed);
                const SimResult r = run_simulation(g, c);
                const MetricsRow last = r.rows.back();
                sa += last.acc_rate;
                ss += last.succ_rate;
                sd += last.del_rate;
                // precision is a per-request snapshot; average the tail
                double tp = 0;
                for (std::size_t i = r.rows.size() - 100; i < r.rows.size(); ++i)
                    tp += r.rows[i].precision;
                sp += tp / 100;
            }
            acc.push_back(sa / 10);
            succ.push_back(ss / 10);
            prec.push_back(sp / 10);
            del.push_back(sd / 10);
        }
        // one inversion of at most 0.01 is forgiven per sequence
        auto nondecreasing = [](const std::vector<double>& v) {
            int bad = 0;
            for (std::size_t i = 1; i < v.size(); ++i)
                if (v[i] < v[i - 1] - 1e-12 && ++bad && v[i - 1] - v[i] > 0.01)
                    return false;
            return bad <= 1;
        };
        auto nonincreasing = [&](std::vector<double> v) {
            for (double& x : v) x = -x;
            return nondecreasing(v);
        };
        const double del_span =
            *std::max_element(del.begin(), del.end()) -
            *std::min_element(del.begin(), del.end());
        const bool ok = nondecreasing(acc) && nondecreasing(prec) &&
                        nonincreasing(succ) && del_span < 0.05;
        char buf[160];
        std::snprintf(buf, sizeof(buf), " [%s acc %.3f->%.3f succ %.3f->%.3f del span %.3f]",
                      strategy_name(strat), acc.front(), acc.back(), succ.front(),
                      succ.back(), del_span);
        detail += buf;
        pass = pass && ok;
    }
    std::printf("criterion 6: %s%s\n", pass ? "PASS" : "FAIL", detail.c_str());
    return pass;
}

// ---------------------------------------------------------------- criterion 7

bool criterion7() {
    // part A: lost-drone fraction with the contingency machinery on
    int accepted = 0, lost = 0, seed = 0;
    while (accepted < 5000 && seed < 16) {
        const Graph g = generate_random_map(100, 1000, 1000, 3,
                                            81000 + static_cast<std::uint64_t>(seed));
        SimConfig c;
        c.strategy = Strategy::Frontier;
        c.requests = 2000;
        c.safety = true;
        c.kappa = 0.95;
        c.seed = 82000 + static_cast<std::uint64_t>(seed);
        const SimResult r = run_simulation(g, c);
        accepted += r.accepted;
        lost += r.lost;
        ++seed;
    }
    const double lost_frac =
        accepted == 0 ? 1.0 : static_cast<double>(lost) / accepted;

    // part B: truncated convolution against rejection sampling
    Rng rng(10007);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        TruncationContext c;
        c.mu = rng.uniform(5, 20);
        c.sigma2 = rng.uniform(0.5, 9);
        c.delta = c.mu + rng.uniform(-2, 1.5) * std::sqrt(c.sigma2);
        c.mu_backup = rng.uniform(1, 8);
        c.sigma2_backup = rng.uniform(0.1, 4);
        c.budget = c.mu + c.mu_backup +
                   rng.uniform(-1, 2) * std::sqrt(c.sigma2 + c.sigma2_backup);
        const double exact = truncated_success_probability(c);
        Rng mc_rng(11000 + static_cast<std::uint64_t>(i));
        int kept = 0, ok = 0;
        const double sx = std::sqrt(c.sigma2), sy = std::sqrt(c.sigma2_backup);
        while (kept < 1000000) {
            const double x = gaussian_sample(mc_rng, c.mu, sx);
            if (!(x > c.delta)) continue;
            ++kept;
            if (x + gaussian_sample(mc_rng, c.mu_backup, sy) <= c.budget) ++ok;
        }
        worst = std::max(worst, std::fabs(exact - static_cast<double>(ok) / kept));
    }
    const bool pass = accepted >= 5000 && lost_frac <= 0.02 && worst < 0.005;
    std::printf("criterion 7: %s (lost %d/%d = %.4f; max |conv - mc| = %.5f on 20 contexts)\n",
                pass ? "PASS" : "FAIL", lost, accepted, lost_frac, worst);
    return pass;
}

// ---------------------------------------------------------------- criterion 8

bool criterion8() {
    Rng rng(10008);
    int agree = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Graph g = generate_random_map(10, 400, 400, 3,
                                            83000 + static_cast<std::uint64_t>(trial));
        EnergyBelief bl(g.edge_count()), b0(g.edge_count());
        randomize_beliefs(rng, g, bl, b0);
        const NodeId dest = 1 + static_cast<NodeId>(rng.uniform_index(g.node_count() - 1));
        const auto trip = surrogate_trip(g, bl, b0, dest);
        if (!trip) return false;
        const std::size_t idx = rng.uniform_index(trip->outbound.size());
        const double budget = rng.uniform(10, 80);
        const double phi = rng.uniform(0.02, 0.98);
        const double delta = compute_delta(bl, b0, *trip, idx, budget, phi);
        const double used = delta + rng.uniform(-4, 4);
        const bool by_threshold = used > delta;
        const bool by_probability =
            remaining_trip_probability(bl, b0, *trip, idx, budget - used).value < phi;
        if (by_threshold == by_probability) ++agree;
    }
    const bool pass = agree == 100;
    std::printf("criterion 8: %s (%d/100 in-flight states agree between the two abort rules)\n",
                pass ? "PASS" : "FAIL", agree);
    return pass;
}

// ---------------------------------------------------------------- criterion 9

bool criterion9() {
    const fs::path root = fs::temp_directory_path() / "dronex_acceptance_c9";
    fs::remove_all(root);
    ExperimentSpec spec;
    spec.map_spec = "random:40,3";
    spec.strategies = {Strategy::Frontier, Strategy::ShortestPath};
    spec.alphas = {0.0, 0.2};
    spec.seeds = {1, 2};
    spec.base.requests = 300;
    spec.jobs = 1;

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    spec.out_dir = (root / "a").string();
    if (run_experiment(spec) != 0) return false;
    spec.out_dir = (root / "b").string();
    if (run_experiment(spec) != 0) return false;

    int files = 0;
    bool identical = true;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        ++files;
        const auto other = root / "b" / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other))
            identical = false;
    }
    fs::remove_all(root);
    const bool pass = identical && files == 9;  // 8 variants + aggregate
    std::printf("criterion 9: %s (%d files, reruns %s)\n", pass ? "PASS" : "FAIL",
                files, identical ? "byte-identical" : "differ");
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto want = [&](int n) { return only.empty() || only.count(n); };

    int failures = 0;
    if (want(1) && !criterion1()) ++failures;
    if (want(2) && !criterion2()) ++failures;
    if (want(3) && !criterion3()) ++failures;
    if (want(4) && !criterion4()) ++failures;
    if (want(5) && !criterion5()) ++failures;
    if (want(6) && !criterion6()) ++failures;
    if (want(7) && !criterion7()) ++failures;
    if (want(8) && !criterion8()) ++failures;
    if (want(9) && !criterion9()) ++failures;
    return failures == 0 ? 0 : 1;
}
