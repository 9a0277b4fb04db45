#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "entropy_games/game.hpp"
#include "entropy_games/matrix.hpp"

namespace entropy_games {

/// Per-Despot-state values. Multiplicative scale unless documented otherwise.
using ValueVector = std::vector<double>;

/// sum over (p, d') of m_{pd'} X_{d'}.
inline double people_sum(const EntropyGame& g, Index p, std::span<const double> x) {
    double s = 0.0;
    for (const WeightedArc& a : g.people_arcs(p)) s += a.weight * x[a.despot];
    return s;
}

/// log(sum m_{pd'} exp(x_{d'})), evaluated after shifting by the largest exponent.
inline double log_people_sum(const EntropyGame& g, Index p, std::span<const double> x) {
    double top = -std::numeric_limits<double>::infinity();
    for (const WeightedArc& a : g.people_arcs(p)) top = std::max(top, x[a.despot]);
    double s = 0.0;
    for (const WeightedArc& a : g.people_arcs(p)) s += a.weight * std::exp(x[a.despot] - top);
    return top + std::log(s);
}

/// max over the actions of Tribune node t.
inline double tribune_value(const EntropyGame& g, Index t, std::span<const double> x) {
    double best = -std::numeric_limits<double>::infinity();
    for (Index p : g.tribune_actions(t)) best = std::max(best, people_sum(g, p, x));
    return best;
}

inline double log_tribune_value(const EntropyGame& g, Index t, std::span<const double> x) {
    double best = -std::numeric_limits<double>::infinity();
    for (Index p : g.tribune_actions(t)) best = std::max(best, log_people_sum(g, p, x));
    return best;
}

/// Dynamic programming operator: F_d(X) = min_t max_p sum m_{pd'} X_{d'}.
inline ValueVector apply_F(const EntropyGame& g, std::span<const double> x) {
    ValueVector y(g.num_despot());
    std::vector<double> tribune_cache(g.num_tribune(), std::numeric_limits<double>::quiet_NaN());
    for (Index d = 0; d < g.num_despot(); ++d) {
        double best = std::numeric_limits<double>::infinity();
        for (Index t : g.despot_actions(d)) {
            if (std::isnan(tribune_cache[t])) tribune_cache[t] = tribune_value(g, t, x);
            best = std::min(best, tribune_cache[t]);
        }
        y[d] = best;
    }
    return y;
}

/// Log-conjugate operator f = log o F o exp, evaluated without overflow.
inline ValueVector apply_f(const EntropyGame& g, std::span<const double> x) {
    ValueVector y(g.num_despot());
    std::vector<double> tribune_cache(g.num_tribune(), std::numeric_limits<double>::quiet_NaN());
    for (Index d = 0; d < g.num_despot(); ++d) {
        double best = std::numeric_limits<double>::infinity();
        for (Index t : g.despot_actions(d)) {
            if (std::isnan(tribune_cache[t])) tribune_cache[t] = log_tribune_value(g, t, x);
            best = std::min(best, tribune_cache[t]);
        }
        y[d] = best;
    }
    return y;
}

/// F^delta: Despot's choice fixed, only Tribune maximizes.
inline ValueVector apply_F_delta(const EntropyGame& g, const DespotPolicy& delta, std::span<const double> x) {
    validate(g, delta);
    ValueVector y(g.num_despot());
    for (Index d = 0; d < g.num_despot(); ++d) y[d] = tribune_value(g, delta[d], x);
    return y;
}

/// ^tau F: Tribune's choice fixed, only Despot minimizes.
inline ValueVector apply_F_tau(const EntropyGame& g, const TribunePolicy& tau, std::span<const double> x) {
    validate(g, tau);
    ValueVector y(g.num_despot());
    for (Index d = 0; d < g.num_despot(); ++d) {
        double best = std::numeric_limits<double>::infinity();
        for (Index t : g.despot_actions(d)) best = std::min(best, people_sum(g, tau[t], x));
        y[d] = best;
    }
    return y;
}

/// The linear operator of a policy pair: entry (d, d') = m_{tau(delta(d)), d'}.
inline Matrix policy_matrix(const EntropyGame& g, const DespotPolicy& delta, const TribunePolicy& tau) {
    validate(g, delta);
    validate(g, tau);
    Matrix m(g.num_despot());
    for (Index d = 0; d < g.num_despot(); ++d)
        for (const WeightedArc& a : g.people_arcs(tau[delta[d]])) m(d, a.despot) = a.weight;
    return m;
}

/// Threshold above which multiplicative value iteration reports overflow.
inline constexpr double overflow_threshold = 1e300;

/// Horizon-k values V^k = F^k(e).
inline ValueVector value_iterate(const EntropyGame& g, std::size_t k) {
    ValueVector v(g.num_despot(), 1.0);
    for (std::size_t step = 0; step < k; ++step) {
        v = apply_F(g, v);
        for (double x : v)
            if (!(x < overflow_threshold))
                throw Overflow("value iteration overflowed at horizon " + std::to_string(step + 1) +
                               "; use log_value_iterate");
    }
    return v;
}

/// Horizon-k values in log scale, v^k = f^k(0) = log V^k.
inline ValueVector log_value_iterate(const EntropyGame& g, std::size_t k) {
    ValueVector v(g.num_despot(), 0.0);
    for (std::size_t step = 0; step < k; ++step) v = apply_f(g, v);
    return v;
}

}  // namespace entropy_games
