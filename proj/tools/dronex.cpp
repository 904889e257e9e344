// Experiment runner: simulates delivery requests on a map under a chosen
// exploration strategy and writes per-request metrics CSVs.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dronex/experiment.hpp"

namespace {

using dronex::ExperimentSpec;

// Raw flag values; config-file entries fill unset flags, flags win.
struct RawArgs {
    std::string map, strategy, alpha, seed, safety, config;
    std::string requests, phi, beta, kappa, budget_fraction, out, jobs;
};

void merge_config(RawArgs& a, const std::string& path) {
    const auto kv = dronex::parse_config_file(path);
    auto fill = [&](std::string& slot, const char* key) {
        auto it = kv.find(key);
        if (slot.empty() && it != kv.end()) slot = it->second;
    };
    fill(a.map, "map");
    fill(a.strategy, "strategy");
    fill(a.alpha, "alpha");
    fill(a.seed, "seed");
    fill(a.safety, "safety");
    fill(a.requests, "requests");
    fill(a.phi, "phi");
    fill(a.beta, "beta");
    fill(a.kappa, "kappa");
    fill(a.budget_fraction, "budget-fraction");
    fill(a.out, "out");
    fill(a.jobs, "jobs");
}

ExperimentSpec build_spec(const RawArgs& raw) {
    ExperimentSpec spec;
    if (!raw.map.empty()) spec.map_spec = raw.map;
    if (!raw.strategy.empty()) {
        spec.strategies.clear();
        for (const auto& name : dronex::parse_comma_list<std::string>(raw.strategy)) {
            const auto s = dronex::strategy_from_name(name);
            if (!s) throw dronex::UsageError("unknown strategy: " + name);
            spec.strategies.push_back(*s);
        }
    }
    if (!raw.alpha.empty()) spec.alphas = dronex::parse_comma_list<double>(raw.alpha);
    if (!raw.seed.empty())
        spec.seeds = dronex::parse_comma_list<std::uint64_t>(raw.seed);
    if (!raw.safety.empty()) {
        if (raw.safety != "on" && raw.safety != "off")
            throw dronex::UsageError("--safety must be on or off");
        spec.base.safety = raw.safety == "on";
    }
    auto to_int = [](const std::string& s, const char* flag) {
        try {
            return std::stoi(s);
        } catch (...) {
            throw dronex::UsageError(std::string("bad value for ") + flag + ": " + s);
        }
    };
    auto to_double = [](const std::string& s, const char* flag) {
        try {
            return std::stod(s);
        } catch (...) {
            throw dronex::UsageError(std::string("bad value for ") + flag + ": " + s);
        }
    };
    if (!raw.requests.empty()) spec.base.requests = to_int(raw.requests, "--requests");
    if (!raw.phi.empty()) spec.base.phi = to_double(raw.phi, "--phi");
    if (!raw.beta.empty()) spec.base.beta = to_double(raw.beta, "--beta");
    if (!raw.kappa.empty()) spec.base.kappa = to_double(raw.kappa, "--kappa");
    if (!raw.budget_fraction.empty())
        spec.base.budget_fraction = to_double(raw.budget_fraction, "--budget-fraction");
    if (!raw.out.empty()) spec.out_dir = raw.out;
    if (!raw.jobs.empty()) spec.jobs = to_int(raw.jobs, "--jobs");
    return spec;
}

}  // namespace

namespace dronex {

// Exposed for tests; throws UsageError on bad input.
ExperimentSpec parse_args(const std::vector<std::string>& argv) {
    CLI::App app{"delivery-drone exploration experiment runner"};
    RawArgs raw;
    app.add_option("--map", raw.map, "map file | random:n,k | grid:rows,cols | osm:file");
    app.add_option("--strategy", raw.strategy,
                   "comma list of shortest-path|frontier|optimal|random");
    app.add_option("--requests", raw.requests, "delivery requests per run");
    app.add_option("--phi", raw.phi, "success-probability threshold");
    app.add_option("--alpha", raw.alpha, "comma list of budget inflations");
    app.add_option("--beta", raw.beta, "frontier expansion probability");
    app.add_option("--kappa", raw.kappa, "backup-path safety threshold");
    app.add_option("--safety", raw.safety, "on|off");
    app.add_option("--budget-fraction", raw.budget_fraction,
                   "target fraction of reachable destinations");
    app.add_option("--seed", raw.seed, "comma list of seeds");
    app.add_option("--out", raw.out, "output directory");
    app.add_option("--config", raw.config, "key=value config file (flags win)");
    app.add_option("--jobs", raw.jobs, "worker threads");

    std::vector<std::string> args(argv.rbegin(), argv.rend());  // CLI11 wants reversed
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    if (!raw.config.empty()) merge_config(raw, raw.config);
    return build_spec(raw);
}

}  // namespace dronex

#ifndef DRONEX_CLI_NO_MAIN
int main(int argc, char** argv) {
    try {
        const auto spec =
            dronex::parse_args(std::vector<std::string>(argv + 1, argv + argc));
        return dronex::run_experiment(spec);
    } catch (const dronex::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
#endif
