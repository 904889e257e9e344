#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dronex/generators.hpp"
#include "dronex/graph_io.hpp"
#include "dronex/osm.hpp"
#include "dronex/sim.hpp"

namespace dronex {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
    std::string map_spec = "grid:5,5";
    std::vector<Strategy> strategies{Strategy::Frontier};
    std::vector<double> alphas{0.0};
    std::vector<std::uint64_t> seeds{1};
    SimConfig base;  // strategy/alpha/seed overwritten per variant
    std::string out_dir = "out";
    int jobs = 1;
};

// "file.json" | "random:n,k" | "grid:rows,cols" | "osm:file.xml"
inline Graph resolve_map(const std::string& spec, std::uint64_t seed) {
    const auto colon = spec.find(':');
    const std::string kind = colon == std::string::npos ? "" : spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "random") {
        int n = 0, k = 0;
        if (std::sscanf(rest.c_str(), "%d,%d", &n, &k) != 2)
            throw UsageError("bad --map random spec: " + spec);
        return generate_random_map(n, 1000, 1000, k, seed);
    }
    if (kind == "grid") {
        int r = 0, c = 0;
        if (std::sscanf(rest.c_str(), "%d,%d", &r, &c) != 2)
            throw UsageError("bad --map grid spec: " + spec);
        return generate_grid_map(r, c, 100);
    }
    if (kind == "osm") {
        std::ifstream in(rest, std::ios::binary);
        if (!in) throw UsageError("cannot open osm file: " + rest);
        std::ostringstream ss;
        ss << in.rdbuf();
        return import_road_network(ss.str(), {-90, -180, 90, 180});
    }
    return load_map_file(spec);
}

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out =
        "request,accepted,success,aborted,recall,precision,edge_coverage,"
        "acc_rate,succ_rate,del_rate\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      r.request, r.accepted ? 1 : 0, r.success ? 1 : 0,
                      r.aborted ? 1 : 0, r.recall, r.precision, r.edge_coverage,
                      r.acc_rate, r.succ_rate, r.del_rate);
        out += buf;
    }
    return out;
}

namespace detail {

inline std::string format_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct Variant {
    Strategy strategy;
    double alpha;
    std::uint64_t seed;
};

struct Stat {
    std::vector<double> xs;
    void add(double x) { xs.push_back(x); }
    double mean() const {
        double s = 0;
        for (double x : xs) s += x;
        return xs.empty() ? 0 : s / static_cast<double>(xs.size());
    }
    double stddev() const {
        if (xs.size() < 2) return 0;
        const double m = mean();
        double s = 0;
        for (double x : xs) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(xs.size() - 1));
    }
};

}  // namespace detail

// Runs the cartesian sweep strategies x alphas x seeds, one metrics CSV per
// variant plus an aggregate over seeds. Returns 0 iff everything completed.
inline int run_experiment(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    if (spec.strategies.empty() || spec.alphas.empty() || spec.seeds.empty())
        throw UsageError("experiment needs at least one strategy, alpha, and seed");
    fs::create_directories(spec.out_dir);

    const Graph graph = resolve_map(spec.map_spec, spec.seeds.front());

    std::vector<detail::Variant> variants;
    for (Strategy s : spec.strategies)
        for (double a : spec.alphas)
            for (std::uint64_t sd : spec.seeds) variants.push_back({s, a, sd});

    struct Outcome {
        bool ok = false;
        std::string error;
        MetricsRow last;
    };
    std::vector<Outcome> outcomes(variants.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= variants.size()) return;
            const auto& v = variants[i];
            SimConfig cfg = spec.base;
            cfg.strategy = v.strategy;
            cfg.alpha = v.alpha;
            cfg.seed = v.seed;
            try {
                SimResult res = run_simulation(graph, cfg);
                std::ostringstream name;
                name << strategy_name(v.strategy) << "_alpha"
                     << detail::format_num(v.alpha) << "_seed" << v.seed << ".csv";
                std::ofstream out(fs::path(spec.out_dir) / name.str(), std::ios::binary);
                out << metrics_csv(res.rows);
                if (!out) throw std::runtime_error("write failed: " + name.str());
                outcomes[i].ok = true;
                outcomes[i].last = res.rows.back();
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    const int jobs = std::max(1, spec.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // aggregate over seeds per (strategy, alpha)
    std::map<std::pair<int, double>, std::array<detail::Stat, 6>> agg;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        if (!outcomes[i].ok) continue;
        const auto& v = variants[i];
        auto& a = agg[{static_cast<int>(v.strategy), v.alpha}];
        const auto& r = outcomes[i].last;
        a[0].add(r.acc_rate);
        a[1].add(r.succ_rate);
        a[2].add(r.del_rate);
        a[3].add(r.recall);
        a[4].add(r.precision);
        a[5].add(r.edge_coverage);
    }
    {
        std::ofstream out(fs::path(spec.out_dir) / "aggregate.csv", std::ios::binary);
        out << "strategy,alpha,seeds,acc_rate_mean,acc_rate_std,succ_rate_mean,"
               "succ_rate_std,del_rate_mean,del_rate_std,recall_mean,recall_std,"
               "precision_mean,precision_std,edge_coverage_mean,edge_coverage_std\n";
        char buf[512];
        for (const auto& [key, stats] : agg) {
            std::snprintf(
                buf, sizeof(buf),
                "%s,%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                strategy_name(static_cast<Strategy>(key.first)),
                detail::format_num(key.second).c_str(), stats[0].xs.size(),
                stats[0].mean(), stats[0].stddev(), stats[1].mean(), stats[1].stddev(),
                stats[2].mean(), stats[2].stddev(), stats[3].mean(), stats[3].stddev(),
                stats[4].mean(), stats[4].stddev(), stats[5].mean(), stats[5].stddev());
            out << buf;
        }
    }

    int failures = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].ok) {
            ++failures;
            std::fprintf(stderr, "variant %zu failed: %s\n", i,
                         outcomes[i].error.c_str());
        }
    }
    return failures == 0 ? 0 : 1;
}

// key=value lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        if (!key.empty()) kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

template <typename T>
inline std::vector<T> parse_comma_list(const std::string& s) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::stringstream conv(item);
        T v;
        if (!(conv >> v)) throw UsageError("bad list item: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("empty list: " + s);
    return out;
}

}  // namespace dronex
