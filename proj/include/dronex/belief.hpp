#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dronex/energy.hpp"
#include "dronex/graph.hpp"
#include "dronex/rng.hpp"

namespace dronex {

// One unknown edge's energy estimate. eta2 is the second raw moment; the
// variance is kept in sync (sigma2 = eta2 - mu^2, clamped at zero).
struct GaussianBelief {
    double mu = 0;
    double eta2 = 0;
    double sigma2 = 0;
    double weight = 0;

    // Weighted-moment absorption of one discounted estimate. Returns true if
    // the variance had to be clamped.
    bool absorb(double estimate, double w) {
        if (!(w > 0)) return false;
        const double wt = weight + w;
        mu = (weight * mu + w * estimate) / wt;
        eta2 = (weight * eta2 + w * estimate * estimate) / wt;
        sigma2 = eta2 - mu * mu;
        weight = wt;
        if (sigma2 < 0) {
            sigma2 = 0;
            return true;
        }
        return false;
    }
};

// 5 wind speeds x 5 wind directions x 4 payloads = 100 bins. Direction centers
// are fixed at i*2pi/5; speed and payload centers are midpoints of equal bins
// over the configured ranges.
class ConfigGrid {
public:
    static constexpr int kSpeeds = 5;
    static constexpr int kDirs = 5;
    static constexpr int kPayloads = 4;
    static constexpr int kBins = kSpeeds * kDirs * kPayloads;

    ConfigGrid(double speed_min, double speed_max, double payload_min,
               double payload_max) {
        speed_spacing_ = (speed_max - speed_min) / kSpeeds;
        payload_spacing_ = (payload_max - payload_min) / kPayloads;
        for (int i = 0; i < kSpeeds; ++i)
            speeds_[static_cast<std::size_t>(i)] = speed_min + (i + 0.5) * speed_spacing_;
        for (int i = 0; i < kDirs; ++i)
            dirs_[static_cast<std::size_t>(i)] = i * (kTwoPi / kDirs);
        for (int i = 0; i < kPayloads; ++i)
            payloads_[static_cast<std::size_t>(i)] = payload_min + (i + 0.5) * payload_spacing_;
    }

    // Nearest bin under per-dimension normalized distance; wind direction is
    // circular; ties resolve to the lowest index.
    int nearest(const Configuration& c) const {
        int best = 0;
        double best_d = 1e300;
        for (int idx = 0; idx < kBins; ++idx) {
            const Configuration ctr = center(idx);
            const double dl = (c.payload - ctr.payload) / guard(payload_spacing_);
            const double ds = (c.wind_speed - ctr.wind_speed) / guard(speed_spacing_);
            double dd = std::fabs(normalize_angle(c.wind_direction) - ctr.wind_direction);
            if (dd > std::numbers::pi) dd = kTwoPi - dd;
            dd /= (kTwoPi / kDirs);
            const double d = dl * dl + ds * ds + dd * dd;
            if (d < best_d) {
                best_d = d;
                best = idx;
            }
        }
        return best;
    }

    Configuration center(int idx) const {
        const int dir = idx % kDirs;
        const int spd = (idx / kDirs) % kSpeeds;
        const int pay = idx / (kDirs * kSpeeds);
        return {payloads_[static_cast<std::size_t>(pay)], speeds_[static_cast<std::size_t>(spd)],
                dirs_[static_cast<std::size_t>(dir)]};
    }

private:
    static double guard(double spacing) { return spacing > 0 ? spacing : 1.0; }

    std::array<double, kSpeeds> speeds_{};
    std::array<double, kDirs> dirs_{};
    std::array<double, kPayloads> payloads_{};
    double speed_spacing_ = 0;
    double payload_spacing_ = 0;
};

// Multivariate linear model over (l, s, sin d, cos d, L, sin theta, cos theta, 1).
// Angles enter as sin/cos pairs to avoid the wrap-around discontinuity.
// Training accumulates normal equations, so refits are O(1) in the number of
// stored rows.
class Regressor {
public:
    static constexpr int kFeatures = 8;
    using Features = Eigen::Matrix<double, kFeatures, 1>;

    static Features features(const Configuration& c, const DirectedEdge& e) {
        Features f;
        f << c.payload, c.wind_speed, std::sin(c.wind_direction),
            std::cos(c.wind_direction), e.length, std::sin(e.bearing),
            std::cos(e.bearing), 1.0;
        return f;
    }

    void add_row(const Features& f, double y) {
        xtx_ += f * f.transpose();
        xty_ += f * y;
        ++rows_;
        dirty_ = true;
    }

    std::int64_t rows() const { return rows_; }
    bool trained() const { return rows_ >= kFeatures; }

    void refit() const {
        if (!dirty_) return;
        Eigen::Matrix<double, kFeatures, kFeatures> a = xtx_;
        for (int i = 0; i < kFeatures; ++i) a(i, i) += 1e-9;  // rank guard
        coef_ = a.ldlt().solve(xty_);
        dirty_ = false;
    }

    // Raw linear prediction (unclamped).
    double predict(const Features& f) const {
        refit();
        return coef_.dot(f);
    }

    // Split of the prediction into a per-configuration and a per-edge part,
    // so a sweep over bins x edges costs one addition per pair.
    double config_term(const Configuration& c) const {
        refit();
        return coef_[0] * c.payload + coef_[1] * c.wind_speed +
               coef_[2] * std::sin(c.wind_direction) +
               coef_[3] * std::cos(c.wind_direction) + coef_[7];
    }
    double edge_term(const DirectedEdge& e) const {
        refit();
        return coef_[4] * e.length + coef_[5] * std::sin(e.bearing) +
               coef_[6] * std::cos(e.bearing);
    }

private:
    Eigen::Matrix<double, kFeatures, kFeatures> xtx_ =
        Eigen::Matrix<double, kFeatures, kFeatures>::Zero();
    Features xty_ = Features::Zero();
    std::int64_t rows_ = 0;
    mutable Features coef_ = Features::Zero();
    mutable bool dirty_ = true;
};

// Regression estimate for an edge under a configuration; falls back to the
// prior-style k*L until the regressor has at least as many rows as features.
inline double predict_unknown(const Regressor& reg, const DirectedEdge& e,
                              const Configuration& c, double prior_k) {
    if (!reg.trained()) return prior_k * e.length;
    return std::max(0.0, reg.predict(Regressor::features(c, e)));
}

// Proximity discount between a measured and a target edge.
inline double proximity_weight(const Graph& g, EdgeId measured, EdgeId target,
                               double c1, double c2) {
    return c1 * std::exp(-c2 * g.midpoint_distance(measured, target));
}

// Per-configuration-bin energy model: the known/unknown partition plus a
// Gaussian belief for every unknown edge.
class EnergyBelief {
public:
    explicit EnergyBelief(std::size_t edge_count)
        : known_(edge_count, 0), known_value_(edge_count, 0), beliefs_(edge_count),
          unknown_count_(edge_count) {}

    bool is_known(EdgeId e) const { return known_[static_cast<std::size_t>(e)] != 0; }
    double known_value(EdgeId e) const { return known_value_[static_cast<std::size_t>(e)]; }
    const GaussianBelief& belief(EdgeId e) const { return beliefs_[static_cast<std::size_t>(e)]; }
    GaussianBelief& belief(EdgeId e) { return beliefs_[static_cast<std::size_t>(e)]; }
    std::size_t unknown_count() const { return unknown_count_; }
    std::size_t edge_count() const { return known_.size(); }
    long clamp_events() const { return clamp_events_; }

    // Mean energy the planner uses for edge e.
    double mean(EdgeId e) const {
        return is_known(e) ? known_value(e) : belief(e).mu;
    }

    void set_prior(EdgeId e, double mu, double sigma2, double w0) {
        auto& b = beliefs_[static_cast<std::size_t>(e)];
        b.mu = mu;
        b.sigma2 = sigma2;
        b.eta2 = sigma2 + mu * mu;
        b.weight = w0;
    }

    // Re-measuring overwrites; known edges never return to unknown.
    void set_known(EdgeId e, double value) {
        if (!is_known(e)) {
            known_[static_cast<std::size_t>(e)] = 1;
            --unknown_count_;
        }
        known_value_[static_cast<std::size_t>(e)] = value;
    }

    void absorb(EdgeId e, double estimate, double w) {
        if (beliefs_[static_cast<std::size_t>(e)].absorb(estimate, w)) ++clamp_events_;
    }

private:
    std::vector<char> known_;
    std::vector<double> known_value_;
    std::vector<GaussianBelief> beliefs_;
    std::size_t unknown_count_;
    long clamp_events_ = 0;
};

// All 100 bins plus the shared regressor. Measurements land in one bin's
// known set; the regression estimate then propagates to the remaining
// unknowns, across every bin when cross-bin transfer is on.
class BeliefBank {
public:
    BeliefBank(const Graph& g, ConfigGrid grid, double prior_k, double prior_w0,
               double c1, double c2, bool cross_bin, std::uint64_t seed)
        : graph_(&g),
          grid_(grid),
          prior_k_(prior_k),
          c1_(c1),
          c2_(c2),
          cross_bin_(cross_bin) {
        if (!(prior_k > 0) || !(prior_w0 > 0))
            throw std::invalid_argument("prior constants must be positive");
        bins_.reserve(ConfigGrid::kBins);
        Rng rng(seed);
        for (int b = 0; b < ConfigGrid::kBins; ++b) {
            EnergyBelief eb(g.edge_count());
            for (const auto& e : g.edges()) {
                const double kl = prior_k * e.length;
                const double mu = rng.uniform(0.5 * kl, 1.5 * kl);
                const double s2 = (0.5 * kl) * (0.5 * kl) / 3.0;  // Var of U[0.5kL,1.5kL]
                eb.set_prior(e.id, mu, s2, prior_w0);
            }
            bins_.push_back(std::move(eb));
        }
    }

    const ConfigGrid& grid() const { return grid_; }
    const Regressor& regressor() const { return reg_; }
    double prior_k() const { return prior_k_; }
    int nearest(const Configuration& c) const { return grid_.nearest(c); }
    const EnergyBelief& bin(int idx) const { return bins_[static_cast<std::size_t>(idx)]; }
    EnergyBelief& bin(int idx) { return bins_[static_cast<std::size_t>(idx)]; }

    // Absorbs one measurement taken under `measured_cfg` on edge `e`,
    // stored into bin `bin_idx`.
    void record_measurement(int bin_idx, EdgeId e, const Configuration& measured_cfg,
                            double value) {
        if (!(value >= 0)) throw std::invalid_argument("measured energy must be >= 0");
        bins_[static_cast<std::size_t>(bin_idx)].set_known(e, value);
        reg_.add_row(Regressor::features(measured_cfg, *edge(e)), value);

        const Graph& g = *graph_;
        const std::size_t ne = g.edge_count();
        // proximity weights are shared across bins
        std::vector<double> w(ne);
        const double mx = g.midpoint_x(e), my = g.midpoint_y(e);
        for (std::size_t t = 0; t < ne; ++t) {
            const double dx = g.midpoint_x(static_cast<EdgeId>(t)) - mx;
            const double dy = g.midpoint_y(static_cast<EdgeId>(t)) - my;
            const double ex = c2_ * std::hypot(dx, dy);
            w[t] = ex < 28.0 ? c1_ * std::exp(-ex) : 0.0;  // below 1e-12 of c1
        }
        const bool trained = reg_.trained();
        std::vector<double> edge_term;
        if (trained) {
            edge_term.resize(ne);
            for (std::size_t t = 0; t < ne; ++t)
                edge_term[t] = reg_.edge_term(g.edges()[t]);
        }
        const int lo = cross_bin_ ? 0 : bin_idx;
        const int hi = cross_bin_ ? ConfigGrid::kBins : bin_idx + 1;
        for (int b = lo; b < hi; ++b) {
            EnergyBelief& eb = bins_[static_cast<std::size_t>(b)];
            const Configuration ctr = grid_.center(b);
            const double cfg_term = trained ? reg_.config_term(ctr) : 0.0;
            for (std::size_t t = 0; t < ne; ++t) {
                if (eb.is_known(static_cast<EdgeId>(t))) continue;
                if (w[t] <= 0) continue;
                const double est =
                    trained ? std::max(0.0, cfg_term + edge_term[t])
                            : prior_k_ * g.edges()[t].length;
                eb.absorb(static_cast<EdgeId>(t), est, w[t]);
            }
        }
    }

private:
    const DirectedEdge* edge(EdgeId e) const { return &graph_->edge(e); }

    const Graph* graph_;
    ConfigGrid grid_;
    std::vector<EnergyBelief> bins_;
    Regressor reg_;
    double prior_k_;
    double c1_;
    double c2_;
    bool cross_bin_;
};

// Single-bin update with an externally supplied regressor, matching the bank
// path bin-for-bin; kept separate so it can be exercised directly.
inline void record_measurement(EnergyBelief& belief, const Graph& g, EdgeId e,
                               double measured, Regressor& reg,
                               const Configuration& bin_center, double prior_k,
                               double c1, double c2) {
    if (!(measured >= 0)) throw std::invalid_argument("measured energy must be >= 0");
    belief.set_known(e, measured);
    reg.add_row(Regressor::features(bin_center, g.edge(e)), measured);
    for (const auto& target : g.edges()) {
        if (belief.is_known(target.id)) continue;
        const double w = proximity_weight(g, e, target.id, c1, c2);
        if (w <= 0) continue;
        const double est = predict_unknown(reg, target, bin_center, prior_k);
        belief.absorb(target.id, est, w);
    }
}

}  // namespace dronex
